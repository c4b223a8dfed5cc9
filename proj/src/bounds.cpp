#include "driftbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "driftbound/error.hpp"
#include "driftbound/quadrature.hpp"

namespace driftbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> geometric_samples(double a, double b, int count) {
  std::vector<double> out;
  if (count <= 1 || a == b) {
    out.push_back(b);
    return out;
  }
  const double ratio = std::log(b / a);
  for (int i = 0; i < count; ++i) out.push_back(a * std::exp(ratio * i / (count - 1)));
  out.back() = b;
  return out;
}

}  // namespace

double max_principle_envelope(const TimeFunction& G, const TimeFunction& F, double t, Direction dir) {
  if (!(t >= 0.0)) throw Error(ErrorCode::BadParameter, "envelope time must be non-negative");
  auto checked = [&F](double s) {
    const double v = F(s);
    if (v < 0.0) {
      throw Error(ErrorCode::NegativeForcingMajorant, "forcing majorant is " + num(v) + " at t=" + num(s));
    }
    return v;
  };
  double integral = 0.0;
  if (std::isinf(t)) {
    const auto tail = quad::integrate_to_infinity(checked, 0.0);
    integral = tail.converged ? tail.value : kInf;
  } else {
    integral = quad::simpson(checked, 0.0, t);
  }
  const double g = G(t);
  return dir == Direction::Lower ? g - integral : g + integral;
}

Range global_range(double m1, double m1_tilde, double m2, double m2_tilde) {
  return {m1 + m1_tilde, m2 - m2_tilde};
}

GrowthParams growth_params(double c0, double M1, double M2, double r0, double R, double T) {
  if (!(c0 > 0.0) || !(T > 0.0) || !(r0 > 0.0) || M1 < 0.0 || M2 < 0.0) {
    throw Error(ErrorCode::BadParameter, "growth lemma needs c0 > 0, T > 0, r0 > 0 and M1, M2 >= 0");
  }
  if (r0 >= R) throw Error(ErrorCode::BadGeometry, "inner radius " + num(r0) + " is not below outer radius " + num(R));
  GrowthParams out{};
  out.beta_star = (M1 + M2 * R) / (2.0 * c0);
  const double R2 = R * R;
  if (std::fabs(4.0 * c0 * out.beta_star * T - R2) <= 1e-12 * R2) {
    out.beta = out.beta_star;
    out.T_star = T;
  } else {
    out.beta = std::max(out.beta_star, R2 / (4.0 * c0 * T));
    out.T_star = std::min(R2 / (4.0 * c0 * out.beta), T);
  }
  out.eta_star = -std::expm1(2.0 * out.beta * std::log(r0 / R));
  return out;
}

std::vector<GrowthIterate> iterate_growth(std::span<const double> eta, std::span<const double> Lambda, double J0) {
  if (eta.size() != Lambda.size()) throw Error(ErrorCode::BadParameter, "need one Lambda_k per contraction factor");
  std::vector<GrowthIterate> out;
  out.reserve(eta.size());
  double J = J0;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const double interval = J + Lambda[k];
    J = eta[k] * J + Lambda[k];
    out.push_back({J, interval});
  }
  return out;
}

std::vector<GrowthIterate> iterate_growth(const GrowthSchedule& schedule, std::span<const double> Lambda,
                                          double J0) {
  std::vector<double> eta;
  eta.reserve(schedule.steps.size());
  for (const auto& s : schedule.steps) eta.push_back(s.eta_k);
  return iterate_growth(eta, Lambda, J0);
}

double geometric_tail(double eta, double Lambda_inf) {
  if (eta < 0.0 || Lambda_inf < 0.0) throw Error(ErrorCode::BadParameter, "geometric tail needs eta >= 0, Lambda >= 0");
  if (Lambda_inf == 0.0) return 0.0;
  if (eta >= 1.0) return kInf;
  return Lambda_inf / (1.0 - eta);
}

double bounded_drift_bound(double eta_star, double boundary_limsup, double forcing_window_limsup) {
  const double data = boundary_limsup + forcing_window_limsup;
  if (data == 0.0) return 0.0;
  if (!(eta_star < 1.0)) return kInf;
  const double bound = (2.0 - eta_star) / (1.0 - eta_star) * data;
  return std::isfinite(bound) ? bound : kInf;
}

BoundedDriftEnvelope bounded_drift_envelope(double c0, double M1, double M2, const Domain& domain, const Point& x0,
                                            double boundary_limsup, double forcing_window_limsup) {
  if (boundary_limsup < 0.0 || forcing_window_limsup < 0.0) {
    throw Error(ErrorCode::BadParameter, "limsups of non-negative data must be non-negative");
  }
  const auto ext = radial_extents(domain, x0);
  const double beta_star = (M1 + M2 * ext.R_star) / (2.0 * c0);
  const double T = ext.R_star * ext.R_star / (4.0 * c0 * beta_star);
  const auto gp = growth_params(c0, M1, M2, ext.r_star, ext.R_star, T);
  return {ext.r_star,  ext.R_star,  gp.beta_star, gp.T_star,
          gp.eta_star, bounded_drift_bound(gp.eta_star, boundary_limsup, forcing_window_limsup)};
}

double drift_exponent(double c0, double M1, double d, double z) {
  if (!(z > d)) throw Error(ErrorCode::BadParameter, "drift growth value must exceed the diameter");
  return -(M1 + z * z) / c0 * std::log1p(-d / z);
}

GrowthSchedule unbounded_drift_schedule(double c0, double M1, const Domain& domain, const TimeFunction& z0,
                                        double eps0, int K, const ScheduleOptions& options) {
  if (!(c0 > 0.0) || M1 < 0.0 || !(eps0 > 0.0) || K < 1 || options.per_decade < 1) {
    throw Error(ErrorCode::BadParameter, "schedule needs c0 > 0, M1 >= 0, eps0 > 0, K >= 1");
  }
  const double d = diameter(domain);
  const double start = std::max(1.0 / 3.0, options.t_star);
  if (!(options.horizon > start)) throw Error(ErrorCode::BadParameter, "search horizon must exceed the start time");
  const auto count = static_cast<int>(std::floor(options.per_decade * std::log10(options.horizon / start)));
  if (count < 2) throw Error(ErrorCode::BadParameter, "search horizon too short for the sample grid");

  std::vector<double> times(static_cast<std::size_t>(count));
  std::vector<double> z(times.size());
  for (int j = 0; j < count; ++j) {
    // Strictly after the start: T0 > max(1/3, t_star).
    times[static_cast<std::size_t>(j)] = start * std::pow(10.0, static_cast<double>(j + 1) / options.per_decade);
    z[static_cast<std::size_t>(j)] = z0(times[static_cast<std::size_t>(j)]);
  }
  for (std::size_t j = 1; j < z.size(); ++j) {
    if (z[j] < z[j - 1]) {
      throw Error(ErrorCode::NotIncreasing, "z0 decreases between t=" + num(times[j - 1]) + " and t=" + num(times[j]));
    }
  }
  if (!(z.back() > z.front())) throw Error(ErrorCode::NotIncreasing, "z0 does not increase over the sampled horizon");

  const double floor_z = std::max(d, std::sqrt(M1));
  auto ok = [&](std::size_t j) {
    return z[j] > floor_z && drift_exponent(c0, M1, d, z[j]) <= d / c0 * z[j] + d * d / (2.0 * c0) + eps0;
  };
  if (!ok(z.size() - 1)) {
    throw Error(ErrorCode::NoValidT0, "no start time up to t=" + num(options.horizon) + " meets the drift condition");
  }
  std::size_t first = z.size() - 1;
  while (first > 0 && ok(first - 1)) --first;

  GrowthSchedule out;
  out.mode = ScheduleMode::Unbounded;
  out.T0 = times[first];
  out.steps.reserve(static_cast<std::size_t>(K));
  double T = out.T0;
  double prev_R = z[first];
  for (int k = 1; k <= K; ++k) {
    GrowthStep s;
    s.k = k;
    s.R_k = z0(out.T0 + k);
    if (s.R_k < prev_R) throw Error(ErrorCode::NotIncreasing, "z0 decreases at t=" + num(out.T0 + k));
    prev_R = s.R_k;
    s.m_k = s.R_k;
    s.r_k = s.R_k - d;
    s.center = barrier_center(domain, s.R_k);
    s.beta_k = (M1 + s.R_k * s.m_k) / (2.0 * c0);
    s.tau_k = s.R_k * s.R_k / (2.0 * (M1 + s.R_k * s.m_k));
    s.eta_k = -std::expm1(2.0 * s.beta_k * std::log1p(-d / s.R_k));
    T += s.tau_k;
    s.T_k = T;
    const double R2 = s.R_k * s.R_k;
    const double tol = 1e-12 * std::max(1.0, T);
    if (std::fabs(4.0 * c0 * s.beta_k * s.tau_k - R2) > 1e-12 * R2 || s.tau_k < 0.25 || s.tau_k > 0.5 ||
        T < out.T0 + k / 4.0 - tol || T > out.T0 + k / 2.0 + tol) {
      throw HypothesisFailed("step durations", "tausmall", "step " + std::to_string(k) + " has tau=" + num(s.tau_k));
    }
    out.steps.push_back(std::move(s));
  }
  return out;
}

double unbounded_drift_bound(double ell, double c0, double d) {
  if (ell == 0.0) return 0.0;
  const double bound = std::exp(d * d / (2.0 * c0)) * ell;
  return std::isfinite(bound) ? bound : kInf;
}

UnboundedDriftEnvelope unbounded_drift_envelope(const TimeFunction& Lambda_bar, const TimeFunction& z0, double c0,
                                                double d, double window_begin, double window_end, int samples) {
  if (!(window_begin > 0.0) || window_end < window_begin) throw Error(ErrorCode::BadParameter, "bad tail window");
  double ell = 0.0;
  for (double t : geometric_samples(window_begin, window_end, samples)) {
    const double lam = Lambda_bar(t);
    if (lam < 0.0) throw Error(ErrorCode::BadParameter, "Lambda_bar must be non-negative");
    if (lam == 0.0) continue;
    ell = std::max(ell, std::exp(std::log(lam) + d / c0 * z0(t)));
  }
  return {ell, unbounded_drift_bound(ell, c0, d), window_begin, window_end};
}

ConditionReport condition_report(const TimeFunction& z0, const TimeFunction& Lambda_bar, double c0, double d,
                                 const ConditionOptions& options) {
  ConditionReport rep;
  const double k = d / c0;
  auto weight = [&](double t) { return std::exp(-k * z0(t)); };

  // Divergence, integrated in u = ln t so the horizon can be astronomically far.
  auto integrand = [&](double u) { return std::exp(u - k * z0(std::exp(u))); };
  const double u_end = std::log(options.horizon);
  for (double u = std::log(options.t_begin); u < u_end && !rep.diverges; u += 1.0) {
    rep.partial_integral += quad::simpson(integrand, u, std::min(u + 1.0, u_end));
    rep.diverges = rep.partial_integral >= options.threshold;
  }

  const double kappa = std::exp(-d * d / (2.0 * c0) - options.epsilon);
  for (int j = 0; j <= 12 && rep.monotone_sign == 0; ++j) {
    const double t_star = options.t_begin * std::pow(10.0, j);
    const auto ts = geometric_samples(t_star, 10.0 * t_star, options.window_samples);
    int sign = 0;
    bool single = true;
    for (std::size_t i = 0; i + 1 < ts.size() && single; ++i) {
      const double a = ts[i], b = ts[i + 1];
      const double diff = std::log(Lambda_bar(b)) - std::log(Lambda_bar(a)) + kappa * quad::simpson(weight, a + 1.0, b + 1.0);
      const int s = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (s == 0 || (sign != 0 && s != sign)) single = false;
      sign = s;
    }
    if (single && sign != 0) {
      rep.monotone_sign = sign;
      rep.t_star = t_star;
      rep.window_end = 10.0 * t_star;
    }
  }
  return rep;
}

std::string_view to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::Ex1i: return "ex1_i";
    case FamilyKind::Ex1ii: return "ex1_ii";
    case FamilyKind::Ex1iii: return "ex1_iii";
    case FamilyKind::Ex2: return "ex2";
  }
  return "?";
}

FamilyResult example_family(const FamilyParams& p, const ConditionOptions& options) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::BadParameter, msg); };
  auto hyp = [&p](const std::string& assumption, const std::string& msg) {
    throw HypothesisFailed(assumption, p.kind == FamilyKind::Ex2 ? "ex2" : "ex1", msg);
  };
  if (!(p.c0 > 0.0) || !(p.d > 0.0)) bad("families need c0 > 0 and d > 0");
  if (!(p.L > 0.0)) bad("families need L > 0");
  const double k = p.d / p.c0;
  std::string z0, lam;
  double ell = 0.0;
  switch (p.kind) {
    case FamilyKind::Ex1i:
      if (!(p.gamma > 0.0)) hyp("positive drift growth rate", "ex1_i needs gamma > 0");
      z0 = num(p.gamma) + "*lnln(t)";
      lam = num(p.L) + "*pow(ln(t), " + num(-p.gamma * (k + p.delta)) + ")";
      break;
    case FamilyKind::Ex1ii:
      if (!(p.gamma > 0.0) || !(p.gamma < p.c0 / p.d)) hyp("drift growth rate below c0/d", "ex1_ii needs 0 < gamma < c0/d");
      z0 = num(p.gamma) + "*ln(t*pow(ln(t), " + num(p.alpha) + "))";
      lam = num(p.L) + "*pow(t*pow(ln(t), " + num(p.alpha) + "), " + num(-p.gamma * (k + p.delta)) + ")";
      break;
    case FamilyKind::Ex1iii:
      if (!(p.alpha < 1.0)) hyp("log exponent below one", "ex1_iii needs alpha < 1");
      z0 = num(p.c0 / p.d) + "*ln(t*pow(ln(t), " + num(p.alpha) + "))";
      lam = num(p.L) + "*pow(t*pow(ln(t), " + num(p.alpha) + "), " + num(-1.0 - p.delta / k) + ")";
      break;
    case FamilyKind::Ex2:
      if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.gamma > 0.0)) hyp("positive exponents", "ex2 needs alpha, beta, gamma > 0");
      z0 = num(p.gamma) + "*pow(lnln(t), " + num(p.alpha) + ")";
      lam = num(p.L) + "*pow(t, " + num(-p.beta) + ")";
      break;
  }
  if (p.kind != FamilyKind::Ex2) {
    if (p.delta < 0.0) hyp("non-negative decay excess", "ex1 families need delta >= 0");
    ell = p.delta == 0.0 ? p.L : 0.0;
  }
  FamilyResult out{Expr::parse(z0), Expr::parse(lam), ell, {}};
  out.report = condition_report([&](double t) { return out.z0.at_time(t); },
                                [&](double t) { return out.Lambda_bar.at_time(t); }, p.c0, p.d, options);
  return out;
}

}  // namespace driftbound
