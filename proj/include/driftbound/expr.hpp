#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftbound {

/// Point at which a coefficient expression is evaluated. Unused coordinates
/// may be left at their defaults.
struct EvalPoint {
  std::span<const double> x{};
  double t = 0.0;
  double s = 0.0;
};

/// Scalar coefficient expression over the variables x1..x3, t and s.
///
/// Grammar (usual precedence, `^` binds tightest and is right associative):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: exp, ln, lnln (= ln(ln(.))), sin, cos, abs, pow. Named
/// constants: pi, e. Values are immutable and cheap to copy; evaluation is
/// reentrant.
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0

  static Expr parse(std::string_view source);
  static Expr constant(double value);
  static Expr x(int axis);  // zero-based axis
  static Expr t();
  static Expr s();

  /// Evaluates the expression. Throws Error(EvalDomain) on ln of a
  /// non-positive argument, division by zero, an undefined power or a
  /// non-finite result.
  [[nodiscard]] double eval(const EvalPoint& point) const;
  [[nodiscard]] double operator()(const EvalPoint& point) const { return eval(point); }
  /// Convenience for functions of time only.
  [[nodiscard]] double at_time(double t) const { return eval(EvalPoint{{}, t, 0.0}); }

  /// Canonical, fully parenthesised form; parse(to_string()) evaluates
  /// identically.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] bool depends_on_x() const noexcept { return max_axis_ >= 0; }
  [[nodiscard]] bool depends_on_t() const noexcept { return uses_t_; }
  [[nodiscard]] bool depends_on_s() const noexcept { return uses_s_; }
  [[nodiscard]] bool is_constant() const noexcept {
    return !depends_on_x() && !uses_t_ && !uses_s_;
  }
  /// Highest zero-based spatial axis referenced, or -1.
  [[nodiscard]] int max_axis() const noexcept { return max_axis_; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, const Expr& exponent);

 private:
  struct Program;
  explicit Expr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  std::shared_ptr<const Program> program_;
  int max_axis_ = -1;
  bool uses_t_ = false;
  bool uses_s_ = false;
};

}  // namespace driftbound
