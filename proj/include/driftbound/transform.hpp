#pragma once

#include <span>
#include <vector>

#include "driftbound/scenario.hpp"
#include "driftbound/solver.hpp"

namespace driftbound {

struct LambdaWindow {
  double lambda1;  // > 0, at least c1/c0
  double lambda2;  // < 0, at most -c2/c0
};

/// Admissible exponents for the two transforms, kept at least `margin` away
/// from zero.
LambdaWindow lambda_window(double c0, double c1, double c2, double margin = 0.1);

/// Which closed form of F is used.
///   Integral   F = C int_0^s exp(lambda z^gamma) dz   (power family)
///   ExpScaled  F = C exp(lambda s) / lambda, or C s at lambda = 0   (identity)
///   Power      F = C s^(lambda+1) / (lambda+1)   (log family, lambda != -1)
///   Log        F = C ln s   (log family, lambda = -1)
enum class ClosedForm { Integral, ExpScaled, Power, Log };

/// Transform F with F' = C exp(lambda P(s)) > 0 on J.
class Transform {
 public:
  Transform(PFamily family, double lambda, double C = 1.0);

  [[nodiscard]] const PFamily& family() const noexcept { return family_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double C() const noexcept { return C_; }
  [[nodiscard]] ClosedForm form() const noexcept { return form_; }

 private:
  PFamily family_;
  double lambda_;
  double C_;
  ClosedForm form_;
};

struct TransformValue {
  double F;
  double Fprime;
};

/// F(s) and F'(s). Throws OutOfRange when s is not in J.
TransformValue transform_value(const Transform& tr, double s);

/// Inequality direction: Lw1 asks for  calL w <= F'(u) Lu  (lambda >= c1/c0),
/// Lw2 for  calL w >= F'(u) Lu  (lambda <= -c2/c0).
enum class Inequality { Lw1, Lw2 };

struct ResidualField {
  std::vector<double> times;               // time of the left state of each pair
  std::vector<std::vector<double>> values; // per pair, per interior node (grid order)
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
  /// Largest violation of the requested sign (max for Lw1, -min for Lw2), >= 0.
  [[nodiscard]] double violation(Inequality dir) const;
};

/// Streaming form of transform_residual: feed consecutive solver states and
/// every `stride`-th consecutive pair contributes one residual level.
class ResidualAccumulator {
 public:
  ResidualAccumulator(const Scenario& scenario, Transform tr, Inequality dir, std::size_t stride = 1,
                      bool keep_field = true);

  void push(const GridState& state);
  [[nodiscard]] const ResidualField& field() const noexcept { return field_; }

 private:
  void accumulate(const GridState& a, const GridState& b);

  const Scenario* scenario_;
  Transform tr_;
  std::size_t stride_;
  bool keep_;
  std::size_t count_ = 0;
  bool have_prev_ = false;
  bool take_next_ = false;
  GridState prev_;
  ResidualField field_;
};

/// Discrete  calL w - F'(u) Lu  at interior nodes for every consecutive pair
/// of states, with w = F(u), centred differences in space, forward
/// differences in time and the drift frozen at B(x, t, u). Throws
/// LambdaOutsideWindow when lambda does not suit the direction and OutOfRange
/// if u leaves J.
ResidualField transform_residual(std::span<const GridState> states, const Scenario& scenario, const Transform& tr,
                                 Inequality dir);

}  // namespace driftbound
