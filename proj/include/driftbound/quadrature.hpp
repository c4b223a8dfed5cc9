#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace driftbound::quad {

/// Composite Simpson rule on [a, b], doubling the panel count until two
/// successive estimates agree to `rtol` (relative) or `atol` (absolute).
/// Previously computed ordinates are reused across refinements.
template <class Func>
double simpson(const Func& f, double a, double b, double rtol = 1e-8, double atol = 1e-15,
               int max_level = 22) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  std::size_t n = 2;
  double h = (b - a) / 2.0;
  double even_sum = 0.0;  // interior nodes with even index
  double odd_sum = f(a + h);
  double prev = h / 3.0 * (fa + fb + 4.0 * odd_sum);
  for (int level = 1; level <= max_level; ++level) {
    even_sum += odd_sum;
    n *= 2;
    h *= 0.5;
    odd_sum = 0.0;
    for (std::size_t i = 1; i < n; i += 2) odd_sum += f(a + static_cast<double>(i) * h);
    const double cur = h / 3.0 * (fa + fb + 4.0 * odd_sum + 2.0 * even_sum);
    if (std::fabs(cur - prev) <= std::max(atol, rtol * std::fabs(cur)) && level >= 2) return cur;
    prev = cur;
  }
  return prev;
}

namespace detail {

template <class Func>
double gauss_kronrod_15(const Func& f, double a, double b, double& err) {
  // Kronrod nodes, Kronrod weights, Gauss weights (Gauss nodes are the odd
  // Kronrod indices).
  static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = hw * xk[i];
    const double pair = f(c - dx) + f(c + dx);
    kron += wk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  err = std::fabs((kron - gauss) * hw);
  return kron * hw;
}

}  // namespace detail

/// Adaptive 7/15-point Gauss-Kronrod quadrature to absolute tolerance `atol`.
template <class Func>
double gauss_kronrod(const Func& f, double a, double b, double atol = 1e-10, int max_intervals = 4000) {
  if (a == b) return 0.0;
  struct Piece {
    double a, b, value, err;
  };
  std::vector<Piece> pending;
  double err = 0.0;
  double value = detail::gauss_kronrod_15(f, a, b, err);
  pending.push_back({a, b, value, err});
  double total = 0.0;
  const double width = std::fabs(b - a);
  int used = 1;
  while (!pending.empty()) {
    Piece p = pending.back();
    pending.pop_back();
    const double budget = atol * std::fabs(p.b - p.a) / width;
    if (p.err <= budget || used >= max_intervals) {
      total += p.value;
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    double el = 0.0, er = 0.0;
    const double vl = detail::gauss_kronrod_15(f, p.a, m, el);
    const double vr = detail::gauss_kronrod_15(f, m, p.b, er);
    used += 2;
    pending.push_back({p.a, m, vl, el});
    pending.push_back({m, p.b, vr, er});
  }
  return total;
}

struct TailIntegral {
  double value;
  bool converged;
};

/// Integral over [a, inf) by summing Simpson pieces of doubling width until
/// two consecutive pieces are negligible. A divergent (or too slowly
/// convergent) integral reports converged = false and value = +inf.
template <class Func>
TailIntegral integrate_to_infinity(const Func& f, double a, double rtol = 1e-8, double atol = 1e-14) {
  double total = 0.0;
  double left = a;
  double width = 1.0;
  int quiet = 0;
  for (int piece = 0; piece < 64; ++piece) {
    const double right = left + width;
    const double v = simpson(f, left, right, rtol, atol * 1e-2);
    total += v;
    if (std::fabs(v) <= std::max(atol, rtol * std::fabs(total))) {
      if (++quiet >= 2) return {total, true};
    } else {
      quiet = 0;
    }
    left = right;
    width *= 2.0;
  }
  return {std::numeric_limits<double>::infinity(), false};
}

/// Tabulated running integral C(t) = int_{t0}^{t} f on [t0, t1], so that
/// windowed integrals over [a, b] cost two lookups and two short Simpson
/// evaluations.
class CumulativeIntegral {
 public:
  template <class Func>
  CumulativeIntegral(const Func& f, double t0, double t1, std::size_t cells, double rtol = 1e-8)
      : t0_(t0), h_((t1 - t0) / static_cast<double>(cells)), table_(cells + 1, 0.0) {
    for (std::size_t i = 0; i < cells; ++i) {
      const double a = t0_ + static_cast<double>(i) * h_;
      table_[i + 1] = table_[i] + simpson(f, a, a + h_, rtol);
    }
    partial_ = [f, rtol](double a, double b) { return simpson(f, a, b, rtol); };
  }

  [[nodiscard]] double upper() const noexcept {
    return t0_ + h_ * static_cast<double>(table_.size() - 1);
  }

  [[nodiscard]] double at(double t) const {
    t = std::clamp(t, t0_, upper());
    auto i = static_cast<std::size_t>((t - t0_) / h_);
    i = std::min(i, table_.size() - 1);
    const double ti = t0_ + static_cast<double>(i) * h_;
    if (t == ti) return table_[i];
    return table_[i] + partial_(ti, t);
  }

  [[nodiscard]] double between(double a, double b) const { return at(b) - at(a); }

 private:
  double t0_;
  double h_;
  std::vector<double> table_;
  std::function<double(double, double)> partial_;
};

}  // namespace driftbound::quad
