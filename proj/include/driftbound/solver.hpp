#pragma once

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "driftbound/certificate.hpp"
#include "driftbound/expr.hpp"
#include "driftbound/geometry.hpp"
#include "driftbound/scenario.hpp"

namespace driftbound {

/// Tensor grid over an interval or box, nodes including the faces. Node
/// index is row-major with axis 0 fastest.
class Grid {
 public:
  Grid(const Domain& domain, std::vector<int> counts);

  [[nodiscard]] int dimension() const noexcept { return n_; }
  [[nodiscard]] const std::vector<int>& counts() const noexcept { return counts_; }
  [[nodiscard]] double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  [[nodiscard]] std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }
  [[nodiscard]] std::span<const double> x(std::size_t node) const {
    return {coords_.data() + node * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  [[nodiscard]] const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  [[nodiscard]] const std::vector<std::size_t>& boundary() const noexcept { return boundary_nodes_; }

 private:
  int n_;
  std::vector<int> counts_;
  std::vector<double> h_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  std::vector<double> coords_;
  std::vector<char> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_nodes_;
};

struct GridStats {
  double max_u = 0.0;
  double min_u = 0.0;
  double max_abs_u = 0.0;
  double max_dev_ustar = 0.0;  // max over all nodes of |u - u_star|
  double boundary_max = 0.0;   // max over boundary nodes of |g - u_star|
};

struct GridState {
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXd u;
  double t = 0.0;
  double u_star = 0.0;
  GridStats stats;
  double compat_mismatch = 0.0;  // max |u0 - g(., 0)| on the boundary (warning metric)

  void refresh_stats();
};

/// Nodes from u0 in the interior and g(., 0) on the boundary. Throws
/// UnsupportedDomain for balls and BadParameter for fewer than 3 nodes per axis.
GridState build_grid(const Domain& domain, const std::vector<int>& resolution, const Expr& u0, const Expr& g,
                     double u_star = 0.0);

/// Explicit Euler stepper bound to one scenario and grid. Coefficients that
/// do not depend on t (or on u) are tabulated once per node.
class Stepper {
 public:
  Stepper(const Scenario& scenario, std::shared_ptr<const Grid> grid);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// Stability bound for `state` (before the 0.9 safety factor); +inf when
  /// the operator has no diffusion or drift.
  [[nodiscard]] double stability_limit(const GridState& state);

  /// Advances by `dt` (or by 0.9 x the stability limit when dt <= 0, never
  /// beyond `t_max`). Throws RangeExit or Instability.
  GridState advance(const GridState& state, double dt, double t_max = std::numeric_limits<double>::infinity());

  /// Discrete right-hand side  <A, D2u> - v . grad_upwind u + f  at an
  /// interior node, with the drift frozen at the state.
  [[nodiscard]] double rhs_at(const GridState& state, std::size_t node);

  /// Discrete linear operator -<A, D2w> + b_frozen . grad_upwind w, where the
  /// frozen drift is B(x, t, u) from `state` (nonlinear) or b(x, t) (linear).
  [[nodiscard]] double frozen_operator(const GridState& state, std::span<const double> w, std::size_t node);

  /// True when the 4-point cross stencil keeps the scheme monotone at every
  /// node (A diagonally dominant in the grid-scaled sense) at the last check.
  [[nodiscard]] bool monotone() const noexcept;

  void set_initial_scale(double scale) noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One explicit Euler step. Convenience wrapper that rebuilds the
/// coefficient tables; use Stepper for long runs.
GridState step(const GridState& state, const Scenario& scenario, double dt);

struct TimeSample {
  double t = 0.0;
  double max_u = 0.0;
  double min_u = 0.0;
  double max_abs_u = 0.0;
  double max_dev_ustar = 0.0;
  double boundary_max = 0.0;
};

struct TimeSeries {
  std::vector<TimeSample> samples;

  void write_csv(std::ostream& os) const;
  [[nodiscard]] double value(const TimeSample& s, Quantity q) const;
};

struct SimulateOptions {
  std::vector<int> resolution;  // nodes per axis
  double t_end = 1.0;
  double sample_dt = 0.1;
  double cfl = 0.9;
  /// Called with the initial state and after every step.
  std::function<void(const GridState&)> observer;
};

struct SimulationResult {
  TimeSeries series;
  GridState final_state;
  std::size_t steps = 0;
  std::vector<std::string> warnings;
};

/// Runs to t_end, sampling every sample_dt (steps are shortened to land on
/// sample times exactly). Deterministic: fixed iteration order.
SimulationResult simulate(const Scenario& scenario, const SimulateOptions& options);

struct DominationReport {
  bool pass = true;
  double worst_margin = -std::numeric_limits<double>::infinity();  // max of measured - bound
  double worst_t = 0.0;
  std::size_t checked = 0;
  bool pointwise_checked = false;
  bool tail_checked = false;
  double tail_sup = 0.0;
};

/// Pointwise: every sample inside the envelope range satisfies
/// measured <= bound + slack. Asymptotic certificates additionally require
/// the sup of the measured quantity over the tail window to stay below
/// final_bound + slack.
DominationReport check_envelope(const TimeSeries& series, const BoundCertificate& cert, double slack);

}  // namespace driftbound
