#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftbound/expr.hpp"
#include "driftbound/geometry.hpp"

namespace driftbound {

enum class PTag { Log, Power, Identity };

/// The nonlinearity P together with its admissible range J.
///
///   log          P = ln s     J = (0, inf)
///   power(g)     P = s^g      J = [0, inf), g >= 1
///   identity     P = s        J = R or [0, inf)
class PFamily {
 public:
  static PFamily log();
  static PFamily power(double gamma);
  static PFamily identity(bool whole_line = true);

  [[nodiscard]] PTag tag() const noexcept { return tag_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] bool whole_line() const noexcept { return whole_line_; }

  [[nodiscard]] bool contains(double s) const noexcept;
  /// Lower end of J (-inf for the whole line) and whether it is excluded.
  [[nodiscard]] double lower() const noexcept;
  [[nodiscard]] bool lower_open() const noexcept { return tag_ == PTag::Log; }
  [[nodiscard]] std::string range_string() const;
  [[nodiscard]] std::string name() const;

  /// P and P'. Callers must keep s in J; values outside are not checked here.
  [[nodiscard]] double P(double s) const;
  [[nodiscard]] double dP(double s) const;

 private:
  PFamily(PTag tag, double gamma, bool whole_line) : tag_(tag), gamma_(gamma), whole_line_(whole_line) {}

  PTag tag_;
  double gamma_;
  bool whole_line_;
};

/// Symmetric n x n matrix of expressions; only the upper triangle is stored.
class SymmetricExprMatrix {
 public:
  SymmetricExprMatrix() = default;
  explicit SymmetricExprMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n * (n + 1) / 2)) {}
  static SymmetricExprMatrix identity(int n);

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] const Expr& operator()(int i, int j) const { return entries_[index(i, j)]; }
  Expr& operator()(int i, int j) { return entries_[index(i, j)]; }

  [[nodiscard]] Eigen::MatrixXd eval(const EvalPoint& p) const;

 private:
  [[nodiscard]] std::size_t index(int i, int j) const;

  int n_ = 0;
  std::vector<Expr> entries_;
};

/// General n x n matrix of expressions, row-major.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  explicit ExprMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n * n)) {}
  static ExprMatrix identity(int n);
  static ExprMatrix zero(int n) { return ExprMatrix(n); }

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] const Expr& operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  Expr& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }

  [[nodiscard]] Eigen::MatrixXd eval(const EvalPoint& p) const;
  [[nodiscard]] ExprMatrix scaled(double factor) const;

 private:
  int n_ = 0;
  std::vector<Expr> entries_;
};

enum class Mode { Linear, Nonlinear };

/// Declared constants. They are hypotheses about the coefficients, checked by
/// sampling in verify_coefficient_bounds, never inferred.
struct Constants {
  double c0 = 1.0;
  double M1 = 1.0;
  std::optional<double> M2;
  std::optional<Expr> z0;  // drift growth profile z0(t), alternative to M2
  double c1 = 0.0;
  double c2 = 0.0;
  double cB = 0.0;
  double gamma0 = 1.0;
  std::optional<Expr> b_bar;  // time-dependent drift growth bound on B
};

struct Scenario {
  Domain domain = Domain::interval(0.0, 1.0);
  Mode mode = Mode::Linear;
  SymmetricExprMatrix A;
  std::vector<Expr> drift;  // b(x,t) in linear mode, B(x,t,s) in nonlinear mode
  ExprMatrix K;
  PFamily p_family = PFamily::identity();
  Expr f;
  Expr g;
  Expr u0;
  double u_star = 0.0;
  Constants constants;

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(domain.dimension()); }

  /// Structural checks: sizes agree with the domain, expressions only
  /// reference existing axes, linear drift does not depend on s, and the
  /// declared constants have the required signs. Throws BadParameter.
  void validate() const;
};

/// Linear-mode scenario on `domain` with A = I, zero drift, K = 0 and zero data.
Scenario make_heat_scenario(const Domain& domain);

[[nodiscard]] Eigen::VectorXd eval_drift(const Scenario& sc, const EvalPoint& p);

/// Pointwise spatial operator value at (x, t) for a function with value u,
/// gradient `grad` and Hessian `hess`:
///   linear:     -<A, D2u> + b . grad
///   nonlinear:  -<A, D2u> + B(x,t,u) . grad + P'(u) (K grad) . grad
/// Lu = u_t + spatial_operator.
[[nodiscard]] double spatial_operator(const Scenario& sc, std::span<const double> x, double t, double u,
                                      const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess);

enum class PresetKind { SlightlyCompressible, Isentropic, IdealGas };

struct PresetParams {
  PresetKind kind = PresetKind::IdealGas;
  double kappa = 1.0;  // slightly compressible
  double gamma = 1.0;  // isentropic
  double c = 1.0;      // isentropic, ideal gas
  bool whole_line = false;  // ideal gas: J = R instead of [0, inf)
};

/// Fields shared by the porous-media presets. B0 is the Darcy-type drift
/// that the preset turns into B(x,t,s) = -s B0(x,t).
struct PresetBase {
  Domain domain = Domain::interval(0.0, 1.0);
  SymmetricExprMatrix A;
  ExprMatrix K0;
  std::vector<Expr> B0;
  Expr f;
  Expr g;
  Expr u0;
  double u_star = 1.0;
  Constants constants;
};

/// Scenario for one of the fluid equations of state. Throws BadParameter for
/// kappa <= 0, c <= 0 or gamma < 1.
Scenario preset(const PresetParams& params, const PresetBase& base);

struct SampleSpec {
  std::vector<int> points_per_axis;  // empty: 5 per axis
  double t_begin = 0.0;
  double t_end = 1.0;
  int time_samples = 11;
  std::vector<double> s_values;  // nonlinear mode; empty: a default set inside J
};

struct MarginEntry {
  std::string assumption;
  std::string quote_key;
  double margin = 0.0;  // negative means violated at a sampled point
  double worst_t = 0.0;
  std::vector<double> worst_x;
  bool pass = true;
};

struct CoefficientReport {
  std::vector<MarginEntry> entries;
  [[nodiscard]] bool pass() const;
  [[nodiscard]] const MarginEntry* find(std::string_view quote_key) const;
};

/// Probe directions: the 2n signed axis vectors followed by 16 fixed
/// pseudo-random unit vectors.
[[nodiscard]] std::vector<Eigen::VectorXd> probe_directions(int n);

/// Sample points covering the closed domain (tensor grid; for balls, the
/// bounding-box grid restricted to the closed ball plus the centre).
[[nodiscard]] std::vector<Eigen::VectorXd> sample_points(const Domain& domain, const std::vector<int>& per_axis);

/// Worst sampled margin of every declared coefficient bound.
[[nodiscard]] CoefficientReport verify_coefficient_bounds(const Scenario& sc, const SampleSpec& spec);

}  // namespace driftbound
