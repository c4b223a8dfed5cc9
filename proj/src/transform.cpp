#include "driftbound/transform.hpp"

#include <algorithm>
#include <cmath>

#include "driftbound/error.hpp"
#include "driftbound/quadrature.hpp"

namespace driftbound {

LambdaWindow lambda_window(double c0, double c1, double c2, double margin) {
  if (!(c0 > 0.0) || c1 < 0.0 || c2 < 0.0 || !(margin > 0.0)) {
    throw Error(ErrorCode::BadParameter, "lambda window needs c0 > 0, c1, c2 >= 0 and margin > 0");
  }
  return {std::max(c1 / c0, margin), std::min(-c2 / c0, -margin)};
}

Transform::Transform(PFamily family, double lambda, double C) : family_(family), lambda_(lambda), C_(C) {
  if (!(C > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::BadParameter, "transform needs C > 0 and finite lambda");
  switch (family_.tag()) {
    case PTag::Power: form_ = ClosedForm::Integral; break;
    case PTag::Identity: form_ = ClosedForm::ExpScaled; break;
    case PTag::Log: form_ = lambda == -1.0 ? ClosedForm::Log : ClosedForm::Power; break;
  }
}

TransformValue transform_value(const Transform& tr, double s) {
  const PFamily& p = tr.family();
  if (!p.contains(s)) throw Error(ErrorCode::OutOfRange, "s=" + std::to_string(s) + " is outside J=" + p.range_string());
  const double lam = tr.lambda();
  const double C = tr.C();
  TransformValue out{0.0, C * std::exp(lam * p.P(s))};
  switch (tr.form()) {
    case ClosedForm::Integral: {
      const double gamma = p.gamma();
      out.F = C * quad::gauss_kronrod([&](double z) { return std::exp(lam * std::pow(z, gamma)); }, 0.0, s, 1e-10 / C);
      break;
    }
    case ClosedForm::ExpScaled:
      out.F = lam == 0.0 ? C * s : C * std::exp(lam * s) / lam;
      break;
    case ClosedForm::Power:
      out.F = C * std::pow(s, lam + 1.0) / (lam + 1.0);
      out.Fprime = C * std::pow(s, lam);  // exact form of C e^{lam ln s}
      break;
    case ClosedForm::Log:
      out.F = C * std::log(s);
      out.Fprime = C / s;
      break;
  }
  return out;
}

double ResidualField::violation(Inequality dir) const {
  if (values.empty()) return 0.0;
  return std::max(0.0, dir == Inequality::Lw1 ? max : -min);
}

namespace {

void check_lambda(const Scenario& sc, const Transform& tr, Inequality dir) {
  const double c0 = sc.constants.c0;
  if (dir == Inequality::Lw1 && tr.lambda() < sc.constants.c1 / c0) {
    throw Error(ErrorCode::LambdaOutsideWindow, "the sub-solution transform needs lambda >= c1/c0");
  }
  if (dir == Inequality::Lw2 && tr.lambda() > -sc.constants.c2 / c0) {
    throw Error(ErrorCode::LambdaOutsideWindow, "the super-solution transform needs lambda <= -c2/c0");
  }
}

/// Centred gradient and Hessian of a nodal field at an interior node.
void derivatives(const Grid& grid, const double* v, std::size_t i, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const int n = grid.dimension();
  for (int a = 0; a < n; ++a) {
    const std::size_t sa = grid.stride(a);
    const double ha = grid.spacing(a);
    grad(a) = (v[i + sa] - v[i - sa]) / (2.0 * ha);
    hess(a, a) = (v[i + sa] - 2.0 * v[i] + v[i - sa]) / (ha * ha);
    for (int b = a + 1; b < n; ++b) {
      const std::size_t sb = grid.stride(b);
      const double hb = grid.spacing(b);
      hess(a, b) = hess(b, a) = (v[i + sa + sb] - v[i + sa - sb] - v[i - sa + sb] + v[i - sa - sb]) / (4.0 * ha * hb);
    }
  }
}

}  // namespace

ResidualAccumulator::ResidualAccumulator(const Scenario& scenario, Transform tr, Inequality dir, std::size_t stride,
                                         bool keep_field)
    : scenario_(&scenario), tr_(std::move(tr)), stride_(std::max<std::size_t>(stride, 1)), keep_(keep_field) {
  if (scenario.mode != Mode::Nonlinear) throw Error(ErrorCode::BadParameter, "transform residuals need a nonlinear scenario");
  check_lambda(scenario, tr_, dir);
}

void ResidualAccumulator::push(const GridState& state) {
  if (take_next_ && have_prev_) accumulate(prev_, state);
  take_next_ = count_ % stride_ == 0;
  ++count_;
  // Only keep the state when it will start a pair.
  if (take_next_) {
    prev_ = state;
    have_prev_ = true;
  }
}

void ResidualAccumulator::accumulate(const GridState& a, const GridState& b) {
  const Scenario& sc = *scenario_;
  const Grid& grid = *a.grid;
  const int n = grid.dimension();
  const double dt = b.t - a.t;
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParameter, "states must have strictly increasing times");
  const auto size = static_cast<std::size_t>(a.u.size());
  std::vector<double> w0(size), w1(size), fp(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto v0 = transform_value(tr_, a.u(static_cast<Eigen::Index>(i)));
    w0[i] = v0.F;
    fp[i] = v0.Fprime;
    w1[i] = transform_value(tr_, b.u(static_cast<Eigen::Index>(i))).F;
  }
  Eigen::VectorXd gu(n), gw(n);
  Eigen::MatrixXd hu(n, n), hw(n, n);
  std::vector<double> level;
  if (keep_) level.reserve(grid.interior().size());
  for (std::size_t i : grid.interior()) {
    const EvalPoint p{grid.x(i), a.t, a.u(static_cast<Eigen::Index>(i))};
    const Eigen::MatrixXd A = sc.A.eval(p);
    const Eigen::VectorXd B = eval_drift(sc, p);  // frozen at u
    const Eigen::MatrixXd K = sc.K.eval(p);
    derivatives(grid, a.u.data(), i, gu, hu);
    derivatives(grid, w0.data(), i, gw, hw);
    const double ui = a.u(static_cast<Eigen::Index>(i));
    const double Lw = (w1[i] - w0[i]) / dt - A.cwiseProduct(hw).sum() + B.dot(gw);
    const double Lu = (b.u(static_cast<Eigen::Index>(i)) - ui) / dt - A.cwiseProduct(hu).sum() + B.dot(gu) +
                      sc.p_family.dP(ui) * (K * gu).dot(gu);
    const double r = Lw - fp[i] * Lu;
    field_.max = std::max(field_.max, r);
    field_.min = std::min(field_.min, r);
    if (keep_) level.push_back(r);
  }
  field_.times.push_back(a.t);
  if (keep_) field_.values.push_back(std::move(level));
}

ResidualField transform_residual(std::span<const GridState> states, const Scenario& scenario, const Transform& tr,
                                 Inequality dir) {
  ResidualAccumulator acc(scenario, tr, dir);
  for (const auto& s : states) acc.push(s);
  return acc.field();
}

}  // namespace driftbound
