#include "driftbound/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftbound/error.hpp"
#include "driftbound/quadrature.hpp"
#include "driftbound/transform.hpp"

namespace driftbound {

std::string_view to_string(NonlinearMode mode) noexcept {
  switch (mode) {
    case NonlinearMode::NHL1: return "NHL1";
    case NonlinearMode::NHL2: return "NHL2";
    case NonlinearMode::NHL3: return "NHL3";
    case NonlinearMode::NHL4: return "NHL4";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_options(const CertifyOptions& opt) {
  if (!(opt.t_end > 0.0) || !(opt.envelope_dt > 0.0) || !(opt.tail_fraction > 0.0 && opt.tail_fraction < 1.0) ||
      opt.times_per_unit < 1) {
    throw Error(ErrorCode::BadParameter, "certificate needs t_end > 0, envelope_dt > 0, tail_fraction in (0,1)");
  }
}

/// Sampled data of a scenario: boundary values g, initial values u0 and the
/// forcing majorant. Sup over the parabolic boundary is taken on a fixed
/// point set, so it is an estimate and not a certified maximum.
class DataSampler {
 public:
  DataSampler(const Scenario& sc, const CertifyOptions& opt) : sc_(sc), per_unit_(opt.times_per_unit) {
    std::vector<int> counts = opt.points_per_axis;
    if (counts.empty()) counts.assign(static_cast<std::size_t>(sc.dimension()), 9);
    closure_ = sample_points(sc.domain, counts);
    if (sc.domain.kind() == DomainKind::Ball) {
      for (const auto& dir : probe_directions(sc.dimension())) {
        boundary_.push_back(sc.domain.center() + sc.domain.radius() * dir);
      }
    } else {
      const Eigen::VectorXd lo = sc.domain.lower(), hi = sc.domain.upper();
      for (auto x : closure_) {
        bool on = false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double tol = 1e-12 * (hi(i) - lo(i));
          if (std::fabs(x(i) - lo(i)) <= tol) x(i) = lo(i), on = true;
          if (std::fabs(x(i) - hi(i)) <= tol) x(i) = hi(i), on = true;
        }
        if (on) boundary_.push_back(x);
      }
    }
    u0_sup = -kInf;
    u0_inf = kInf;
    for (const auto& x : closure_) {
      const double v = sc.u0.eval(at(x, 0.0));
      u0_sup = std::max(u0_sup, v);
      u0_inf = std::min(u0_inf, v);
    }
    if (opt.F) {
      profile_ = *opt.F;
    }
  }

  /// sup over Gamma x [a, b] of fn(g).
  template <class Fn>
  double boundary_sup(double a, double b, Fn fn) const {
    const int n = std::max(2, static_cast<int>(std::ceil((b - a) * per_unit_)));
    double best = -kInf;
    for (int i = 0; i <= n; ++i) {
      const double t = a + (b - a) * i / n;
      for (const auto& x : boundary_) best = std::max(best, fn(sc_.g.eval(at(x, t))));
    }
    return best;
  }

  double g_sup(double a, double b) const { return boundary_sup(a, b, [](double g) { return g; }); }
  double g_inf(double a, double b) const { return -boundary_sup(a, b, [](double g) { return -g; }); }
  double g_abs(double a, double b) const { return boundary_sup(a, b, [](double g) { return std::fabs(g); }); }

  double u0_abs() const { return std::max(std::fabs(u0_sup), std::fabs(u0_inf)); }

  /// sup_x |f(x, t)| on the sample set.
  double f_abs(double t) const {
    double m = 0.0;
    for (const auto& x : closure_) m = std::max(m, std::fabs(sc_.f.eval(at(x, t))));
    return m;
  }

  /// Signs f takes on the sample set over [0, t_end].
  std::pair<bool, bool> f_signs(double t_end) const {
    bool pos = false, neg = false;
    const int n = std::max(2, static_cast<int>(std::ceil(t_end * per_unit_)));
    for (int i = 0; i <= n; ++i) {
      for (const auto& x : closure_) {
        const double v = sc_.f.eval(at(x, t_end * i / n));
        pos = pos || v > 0.0;
        neg = neg || v < 0.0;
      }
    }
    return {pos, neg};
  }

  double F(double t) const {
    const double v = profile_ ? profile_->at_time(t) : f_abs(t);
    if (v < 0.0) throw Error(ErrorCode::NegativeForcingMajorant, "forcing majorant is negative at t=" + std::to_string(t));
    return v;
  }

  /// min over samples in [0, t_end] of F(t) - |f(x,t)|; only meaningful for a supplied profile.
  double majorant_margin(double t_end) const {
    double m = kInf;
    const int n = std::max(2, std::min(4000, static_cast<int>(std::ceil(t_end * per_unit_))));
    for (int i = 0; i <= n; ++i) {
      const double t = t_end * i / n;
      m = std::min(m, F(t) - f_abs(t));
    }
    return m;
  }

  bool has_profile() const { return profile_.has_value(); }

  double u0_sup;
  double u0_inf;

 private:
  static EvalPoint at(const Eigen::VectorXd& x, double t) {
    return EvalPoint{std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), t, 0.0};
  }

  const Scenario& sc_;
  int per_unit_;
  std::vector<Eigen::VectorXd> closure_;
  std::vector<Eigen::VectorXd> boundary_;
  std::optional<Expr> profile_;
};

quad::CumulativeIntegral forcing_table(const DataSampler& data, double upper, double dt) {
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(upper / dt)));
  return quad::CumulativeIntegral([&data](double t) { return data.F(t); }, 0.0, upper, cells);
}

SampleSpec coefficient_samples(const Scenario& sc, const CertifyOptions& opt) {
  SampleSpec spec;
  spec.points_per_axis = opt.points_per_axis;
  if (spec.points_per_axis.empty()) spec.points_per_axis.assign(static_cast<std::size_t>(sc.dimension()), 9);
  spec.t_begin = 0.0;
  spec.t_end = opt.t_end;
  spec.time_samples = 21;
  return spec;
}

/// Copy the sampled coefficient margins with the listed labels. Margins
/// within rounding of zero count as zero.
void add_coefficient_checks(BoundCertificate& cert, const Scenario& sc, const CertifyOptions& opt,
                            std::initializer_list<std::string_view> keys) {
  const auto report = verify_coefficient_bounds(sc, coefficient_samples(sc, opt));
  for (const auto& e : report.entries) {
    if (std::find(keys.begin(), keys.end(), e.quote_key) == keys.end()) continue;
    const double margin = e.margin >= -1e-12 ? std::max(e.margin, 0.0) : e.margin;
    cert.add_check(e.assumption, e.quote_key, margin);
  }
}

void add_majorant_check(BoundCertificate& cert, const DataSampler& data, double t_end) {
  if (data.has_profile()) cert.add_check("forcing majorant", "fc1", data.majorant_margin(t_end));
}

std::vector<double> window_times(double a, double b, int n) {
  std::vector<double> ts;
  for (int i = 0; i <= n; ++i) ts.push_back(a + (b - a) * i / n);
  return ts;
}

/// Max-principle samples on [0, t1] starting from the sup G of |u| on the
/// initial slice. Returns the running sup at t1.
double append_max_principle(BoundCertificate& cert, const DataSampler& data, const quad::CumulativeIntegral& cum,
                            double t1, double dt, double G) {
  cert.envelope.push_back({0.0, G});
  const int n = std::max(1, static_cast<int>(std::ceil(t1 / dt - 1e-9)));
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = std::min(t1, i * dt);
    G = std::max(G, data.g_abs(prev, t));
    cert.envelope.push_back({t, G + cum.at(t)});
    prev = t;
  }
  return G;
}

TimeFunction time_function(const Expr& e) {
  return [e](double t) { return e.at_time(t); };
}

}  // namespace

BoundCertificate max_principle_certificate(const Scenario& sc, const CertifyOptions& opt) {
  check_options(opt);
  const DataSampler data(sc, opt);
  BoundCertificate cert;
  cert.kind = CertKind::MaxPrinciple;
  cert.quantity = Quantity::MaxAbsU;
  add_coefficient_checks(cert, sc, opt, {"firstA"});
  add_majorant_check(cert, data, opt.t_end);

  const auto cum = forcing_table(data, opt.t_end, opt.envelope_dt);
  const double G0 = std::max(data.u0_abs(), data.g_abs(0.0, 0.0));
  const double G = append_max_principle(cert, data, cum, opt.t_end, opt.envelope_dt, G0);
  cert.set("c0", sc.constants.c0);
  cert.set("mu1", G);
  cert.set("mu0", cum.at(opt.t_end));
  cert.final_bound = cert.envelope.back().bound;
  cert.set("final_bound", cert.final_bound);
  return cert;
}

BoundCertificate bounded_drift_certificate(const Scenario& sc, const CertifyOptions& opt) {
  check_options(opt);
  if (sc.mode != Mode::Linear) throw Error(ErrorCode::BadParameter, "bounded drift certificates are for linear scenarios");
  if (!sc.constants.M2) throw Error(ErrorCode::BadParameter, "bounded drift certificate needs constants.M2");
  const Constants& k = sc.constants;
  const DataSampler data(sc, opt);
  BoundCertificate cert;
  cert.kind = CertKind::BoundedDrift;
  cert.quantity = Quantity::MaxAbsU;
  cert.asymptotic = true;
  add_coefficient_checks(cert, sc, opt, {"firstA", "condB"});
  add_majorant_check(cert, data, opt.t_end);

  const double d = diameter(sc.domain);
  const Point x0 = barrier_center(sc.domain, opt.radius_factor * d);
  auto geo = bounded_drift_envelope(k.c0, k.M1, *k.M2, sc.domain, x0, 0.0, 0.0);
  const double Ts = geo.T_star;
  const int K = std::max(1, static_cast<int>(std::ceil(opt.t_end / Ts - 1e-12)));
  const auto cum = forcing_table(data, K * Ts + Ts + opt.t_end, std::min(opt.envelope_dt, Ts / 4));

  std::vector<double> eta(static_cast<std::size_t>(K), geo.eta_star), Lambda;
  for (int j = 1; j <= K; ++j) {
    Lambda.push_back(data.g_abs((j - 1) * Ts, j * Ts) + cum.between((j - 1) * Ts, j * Ts));
  }
  const double J0 = std::max(data.u0_abs(), data.g_abs(0.0, 0.0));
  const auto it = iterate_growth(eta, Lambda, J0);
  for (int j = 1; j <= K; ++j) {
    const auto& s = it[static_cast<std::size_t>(j - 1)];
    cert.steps.push_back({j, j * Ts, Ts, geo.eta_star, Lambda[static_cast<std::size_t>(j - 1)], s.J});
    cert.envelope.push_back({(j - 1) * Ts, s.interval});
    cert.envelope.push_back({j * Ts, s.interval});
  }

  cert.tail_begin = opt.tail_fraction * opt.t_end;
  cert.tail_end = opt.t_end;
  const double b_lim = data.g_abs(cert.tail_begin, cert.tail_end);
  double f_lim = 0.0;
  for (double t : window_times(cert.tail_begin, cert.tail_end, 64)) f_lim = std::max(f_lim, cum.between(t, t + Ts));
  cert.final_bound = bounded_drift_bound(geo.eta_star, b_lim, f_lim);

  cert.set("c0", k.c0);
  cert.set("M1", k.M1);
  cert.set("M2", *k.M2);
  cert.set("d", d);
  cert.set("R", geo.R);
  cert.set("r0", geo.r0);
  cert.set("beta_star", geo.beta_star);
  cert.set("T_star", Ts);
  cert.set("eta_star", geo.eta_star);
  cert.set("boundary_limsup", b_lim);
  cert.set("forcing_limsup", f_lim);
  cert.set("final_bound", cert.final_bound);
  return cert;
}

BoundCertificate unbounded_drift_certificate(const Scenario& sc, const CertifyOptions& opt) {
  check_options(opt);
  if (sc.mode != Mode::Linear) throw Error(ErrorCode::BadParameter, "unbounded drift certificates are for linear scenarios");
  if (!sc.constants.z0) throw Error(ErrorCode::BadParameter, "unbounded drift certificate needs constants.z0");
  const Constants& k = sc.constants;
  const DataSampler data(sc, opt);
  const TimeFunction z0 = time_function(*k.z0);
  BoundCertificate cert;
  cert.kind = CertKind::UnboundedDrift;
  cert.quantity = Quantity::MaxAbsU;
  cert.asymptotic = true;
  add_coefficient_checks(cert, sc, opt, {"firstA", "bz"});
  add_majorant_check(cert, data, opt.t_end);

  const double d = diameter(sc.domain);
  const double T0 = unbounded_drift_schedule(k.c0, k.M1, sc.domain, z0, opt.eps0, 1, opt.schedule).T0;
  const int K = std::max(1, static_cast<int>(std::ceil(4.0 * (opt.t_end - T0))));
  const auto schedule = unbounded_drift_schedule(k.c0, k.M1, sc.domain, z0, opt.eps0, K, opt.schedule);
  const double T_last = schedule.steps.back().T_k;
  const auto cum = forcing_table(data, std::max(T_last, opt.t_end) + 1.0, opt.envelope_dt);

  const double G0 = std::max(data.u0_abs(), data.g_abs(0.0, 0.0));
  const double G = append_max_principle(cert, data, cum, std::min(T0, opt.t_end), opt.envelope_dt, G0);
  if (T0 < opt.t_end) {
    const double J0 = std::max(G, data.g_abs(T0, T0)) + cum.at(T0);
    std::vector<double> Lambda;
    double prev = T0;
    for (const auto& s : schedule.steps) {
      Lambda.push_back(data.g_abs(prev, s.T_k) + cum.between(prev, s.T_k));
      prev = s.T_k;
    }
    const auto it = iterate_growth(schedule, Lambda, J0);
    prev = T0;
    for (std::size_t j = 0; j < it.size(); ++j) {
      const auto& s = schedule.steps[j];
      cert.steps.push_back({s.k, s.T_k, s.tau_k, s.eta_k, Lambda[j], it[j].J});
      cert.envelope.push_back({prev, it[j].interval});
      cert.envelope.push_back({s.T_k, it[j].interval});
      prev = s.T_k;
    }
  }

  cert.tail_begin = opt.tail_fraction * opt.t_end;
  cert.tail_end = opt.t_end;
  cert.set("c0", k.c0);
  cert.set("M1", k.M1);
  cert.set("d", d);
  cert.set("eps0", opt.eps0);
  cert.set("T0", T0);
  if (opt.Lambda_bar) {
    const TimeFunction lam = time_function(*opt.Lambda_bar);
    const auto env = unbounded_drift_envelope(lam, z0, k.c0, d, std::max(cert.tail_begin, 1e-12), cert.tail_end);
    cert.final_bound = env.bound;
    cert.set("ell", env.ell);

    const auto rep = condition_report(z0, lam, k.c0, d, opt.conditions);
    cert.add_check("divergent drift weight", "z2cond", rep.partial_integral - opt.conditions.threshold);
    cert.add_check("monotone weighted data", "monocond", rep.monotone_sign != 0 ? 0.0 : -1.0);
    // Data decay: boundary sup plus forcing over [t, t+1] below Lambda_bar(4t).
    double margin = kInf;
    for (double t = T0; t <= opt.t_end; t += 0.25) {
      margin = std::min(margin, lam(4.0 * t) - data.g_abs(t, t + 1.0) - cum.between(t, t + 1.0));
    }
    if (margin < kInf) cert.add_check("data decay profile", "lamst", margin);
  }
  cert.set("final_bound", cert.final_bound);
  return cert;
}

namespace {

struct RangeLedger {
  double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0, m_star = 0.0, M_star = 0.0, mu3 = 0.0;
};

double max_abs_P(const PFamily& p, double lo, double hi) {
  switch (p.tag()) {
    case PTag::Log: return std::max(std::fabs(std::log(lo)), std::fabs(std::log(hi)));
    case PTag::Power: return std::pow(hi, p.gamma());
    case PTag::Identity: return std::max(std::fabs(lo), std::fabs(hi));
  }
  return 0.0;
}

/// Steps common to the L^1 forcing modes: global bound, range in J and
/// the bound on |P(u)|.
RangeLedger l1_range(const Scenario& sc, const DataSampler& data, const CertifyOptions& opt, BoundCertificate& cert) {
  RangeLedger r;
  const auto tail = quad::integrate_to_infinity([&data](double t) { return data.F(t); }, 0.0);
  if (!tail.converged) throw HypothesisFailed("integrable forcing", "fc2", "the integral of F over (0, inf) diverges");
  r.mu0 = tail.value;
  cert.add_check("integrable forcing", "fc2", 0.0);
  const double g_hi = data.g_sup(0.0, opt.t_end), g_lo = data.g_inf(0.0, opt.t_end);
  r.mu1 = std::max({data.u0_abs(), std::fabs(g_hi), std::fabs(g_lo)});
  r.mu2 = r.mu1 + r.mu0;
  const auto [pos, neg] = data.f_signs(opt.t_end);
  const Range range = global_range(std::max(data.u0_sup, g_hi), pos ? r.mu0 : 0.0, std::min(data.u0_inf, g_lo),
                                   neg ? r.mu0 : 0.0);
  r.m_star = std::max(range.lower, -r.mu2);
  r.M_star = std::min(range.upper, r.mu2);
  const PFamily& p = sc.p_family;
  if (!p.contains(r.m_star) || !p.contains(r.M_star)) {
    throw Error(ErrorCode::RangeViolation, "a-priori range [" + std::to_string(r.m_star) + ", " +
                                               std::to_string(r.M_star) + "] is not inside J=" + p.range_string());
  }
  if (!(p.tag() == PTag::Identity && p.whole_line())) cert.add_check("range inside J", "Pbound", r.m_star - p.lower());
  r.mu3 = max_abs_P(p, r.m_star, r.M_star);
  cert.set("mu0", r.mu0);
  cert.set("mu1", r.mu1);
  cert.set("mu2", r.mu2);
  cert.set("m_star", r.m_star);
  cert.set("M_star", r.M_star);
  cert.set("mu3", r.mu3);
  return r;
}

/// Weighted profile Lambda_bar e^{(d/c0) z0} must decay: its value at the
/// horizon is at most 1% of its sampled peak.
double limit_margin(const TimeFunction& lam, const TimeFunction& z0, double c0, double d, double t0, double horizon,
                    double& ell_window) {
  const auto env = unbounded_drift_envelope(lam, z0, c0, d, t0, horizon, 1025);
  ell_window = unbounded_drift_envelope(lam, z0, c0, d, horizon, horizon, 1).ell;
  return 1e-2 * env.ell - ell_window;
}

}  // namespace

BoundCertificate nonlinear_certificate(const Scenario& sc, NonlinearMode mode, const CertifyOptions& opt) {
  check_options(opt);
  if (sc.mode != Mode::Nonlinear) throw Error(ErrorCode::BadParameter, "nonlinear certificates need a nonlinear scenario");
  const Constants& k = sc.constants;
  const PFamily& p = sc.p_family;
  const bool log_modes = mode == NonlinearMode::NHL3 || mode == NonlinearMode::NHL4;
  if (log_modes && p.tag() != PTag::Log) {
    throw HypothesisFailed("logarithmic pressure", "ssca", "non-integrable forcing needs P = ln on (0, inf)");
  }
  if (mode == NonlinearMode::NHL4) {
    if (sc.u_star != 0.0) throw Error(ErrorCode::BadParameter, "NHL4 targets u* = 0");
  } else if (!p.contains(sc.u_star)) {
    throw Error(ErrorCode::BadParameter, "u* is not in J=" + p.range_string());
  }
  if (mode != NonlinearMode::NHL1 && !k.b_bar) throw Error(ErrorCode::BadParameter, "this mode needs constants.b_bar");
  if (mode != NonlinearMode::NHL1 && !opt.Lambda_tilde) throw Error(ErrorCode::BadParameter, "this mode needs certify.Lambda_tilde");
  if (log_modes && !opt.calF) throw Error(ErrorCode::BadParameter, "this mode needs certify.calF");

  const DataSampler data(sc, opt);
  BoundCertificate cert;
  cert.kind = CertKind::Nonlinear;
  cert.quantity = mode == NonlinearMode::NHL4 ? Quantity::MaxU : Quantity::MaxDevUstar;
  cert.asymptotic = true;
  cert.certified_limit = 0.0;
  cert.tail_begin = opt.tail_fraction * opt.t_end;
  cert.tail_end = opt.t_end;
  add_coefficient_checks(cert, sc, opt, {"firstA", "condall", mode == NonlinearMode::NHL1 ? "B0" : "B3"});
  add_majorant_check(cert, data, opt.t_end);

  const auto win = lambda_window(k.c0, k.c1, k.c2, opt.lambda_margin);
  const double l1 = opt.lambda1.value_or(win.lambda1);
  const double l2 = opt.lambda2.value_or(win.lambda2);
  if (!(l1 > 0.0) || !(l2 < 0.0)) throw Error(ErrorCode::BadParameter, "need lambda1 > 0 > lambda2");
  if (log_modes && l2 == -1.0) throw Error(ErrorCode::BadParameter, "lambda2 = -1 is excluded here");
  cert.add_check("sub-solution exponent", "Lw1", l1 - k.c1 / k.c0);
  cert.add_check("super-solution exponent", "Lw2", -k.c2 / k.c0 - l2);

  const double d = diameter(sc.domain);
  cert.set("c0", k.c0);
  cert.set("M1", k.M1);
  cert.set("d", d);
  cert.set("lambda1", l1);
  cert.set("lambda2", l2);
  auto dev = [&](double g) { return std::fabs(g - sc.u_star); };

  if (mode == NonlinearMode::NHL1) {
    const RangeLedger r = l1_range(sc, data, opt, cert);
    const double mu4 = k.cB * std::pow(1.0 + r.mu2, k.gamma0);
    const double C1 = std::exp(r.mu3 * std::max(l1, -l2));
    const double C2 = std::exp(r.mu3 * std::min(-l1, l2));
    cert.set("mu4", mu4);
    cert.set("C1", C1);
    cert.set("C2", C2);
    cert.add_check("boundary data converge", "glim", opt.glim_tol - data.boundary_sup(cert.tail_begin, cert.tail_end, dev));

    const Point x0 = barrier_center(sc.domain, opt.radius_factor * d);
    const auto geo = bounded_drift_envelope(k.c0, k.M1, mu4, sc.domain, x0, 0.0, 0.0);
    const double Ts = geo.T_star;
    cert.set("M2", mu4);
    cert.set("R", geo.R);
    cert.set("r0", geo.r0);
    cert.set("beta_star", geo.beta_star);
    cert.set("T_star", Ts);
    cert.set("eta_star", geo.eta_star);

    const Transform F1(p, l1), F2(p, l2);
    const double w1 = transform_value(F1, sc.u_star).F, w2 = transform_value(F2, sc.u_star).F;
    // Positive parts of the transformed deviations, from the data extremes
    // (F is increasing so extremes of g map to extremes of F(g)).
    auto up = [&](double g_hi) { return std::max(0.0, transform_value(F1, g_hi).F - w1); };
    auto down = [&](double g_lo) { return std::max(0.0, w2 - transform_value(F2, g_lo).F); };

    const int K = std::max(1, static_cast<int>(std::ceil(opt.t_end / Ts - 1e-12)));
    const auto cum = forcing_table(data, K * Ts + Ts + opt.t_end, std::min(opt.envelope_dt, Ts / 4));
    std::vector<double> eta(static_cast<std::size_t>(K), geo.eta_star), L1, L2;
    for (int j = 1; j <= K; ++j) {
      const double a = (j - 1) * Ts, b = j * Ts;
      const double forcing = C1 * cum.between(a, b);
      L1.push_back(up(data.g_sup(a, b)) + forcing);
      L2.push_back(down(data.g_inf(a, b)) + forcing);
    }
    const auto it1 = iterate_growth(eta, L1, up(data.u0_sup));
    const auto it2 = iterate_growth(eta, L2, down(data.u0_inf));
    for (int j = 1; j <= K; ++j) {
      const auto i = static_cast<std::size_t>(j - 1);
      const double bound = std::max(it1[i].interval, it2[i].interval) / C2;
      cert.steps.push_back({j, j * Ts, Ts, geo.eta_star, std::max(L1[i], L2[i]), std::max(it1[i].J, it2[i].J)});
      cert.envelope.push_back({(j - 1) * Ts, bound});
      cert.envelope.push_back({j * Ts, bound});
    }

    const double b_lim = std::max(up(data.g_sup(cert.tail_begin, cert.tail_end)),
                                  down(data.g_inf(cert.tail_begin, cert.tail_end)));
    double f_lim = 0.0;
    for (double t : window_times(cert.tail_begin, cert.tail_end, 64)) {
      f_lim = std::max(f_lim, C1 * cum.between(t, t + Ts));
    }
    cert.set("boundary_limsup", b_lim);
    cert.set("forcing_limsup", f_lim);
    cert.final_bound = bounded_drift_bound(geo.eta_star, b_lim, f_lim) / C2;
    cert.set("final_bound", cert.final_bound);
    return cert;
  }

  // Unbounded drift modes: the hypotheses are checked on samples, and the
  // conclusion is the limit itself. The constants hidden in the decay
  // profile have no closed form, so no finite envelope is claimed.
  const double t_lo = opt.schedule.t_star;
  const auto cum = forcing_table(data, opt.t_end + 1.0, opt.envelope_dt);
  const TimeFunction b_bar = time_function(*k.b_bar);
  const TimeFunction Lt = time_function(*opt.Lambda_tilde);
  TimeFunction z0;
  double profile_margin = kInf;

  if (mode == NonlinearMode::NHL2) {
    const RangeLedger r = l1_range(sc, data, opt, cert);
    const double mu6 = std::pow(1.0 + r.mu2, k.gamma0);
    cert.set("mu6", mu6);
    cert.set("C1", std::exp(r.mu3 * std::max(l1, -l2)));
    cert.set("C2", std::exp(r.mu3 * std::min(-l1, l2)));
    z0 = [b_bar, mu6](double t) { return mu6 * b_bar(t); };
    for (double t = t_lo; t <= opt.t_end; t += 0.25) {
      profile_margin = std::min(profile_margin, Lt(t) - data.boundary_sup(t, t + 1.0, dev) - cum.between(t, t + 1.0));
    }
    cert.add_check("data decay profile", "lamnon", profile_margin);
  } else {
    const auto tail = quad::integrate_to_infinity([&data](double t) { return data.F(t); }, 0.0);
    if (tail.converged) throw HypothesisFailed("non-integrable forcing", "fc3", "the integral of F converges");
    cert.add_check("non-integrable forcing", "fc3", 0.0);
    const TimeFunction calF = time_function(*opt.calF);
    double majorant = kInf;
    for (double t = std::max(t_lo, 1.0); t <= opt.t_end; t += 0.25) majorant = std::min(majorant, calF(t) - cum.at(t));
    cert.add_check("forcing integral majorant", "iFmF", majorant);

    const double g_hi = data.g_sup(0.0, opt.t_end), g_lo = data.g_inf(0.0, opt.t_end);
    const double mu1 = std::max({data.u0_abs(), std::fabs(g_hi), std::fabs(g_lo)}) + 1.0;
    const double mu2 = std::pow(1.0 + mu1, k.gamma0);
    cert.set("mu1", mu1);
    cert.set("mu2", mu2);
    z0 = [b_bar, calF, mu2, g0 = k.gamma0](double t) { return mu2 * b_bar(t) * std::pow(calF(t), g0); };
    for (double t = t_lo; t <= opt.t_end; t += 0.25) {
      const double forced = quad::simpson([&](double s) { return data.F(s) * std::pow(calF(s), l1); }, t, t + 1.0);
      profile_margin = std::min(profile_margin, Lt(t) - data.boundary_sup(t, t + 1.0, dev) - forced);
    }
    cert.add_check("data decay profile", "newLam", profile_margin);

    const auto signs = data.f_signs(opt.t_end);
    const double lower = std::min(data.u0_inf, g_lo);
    if (mode == NonlinearMode::NHL3) {
      if (signs.second || !(lower > 0.0)) {
        throw Error(ErrorCode::RangeViolation, "cannot certify u >= m > 0 from the data");
      }
      cert.set("m_star", lower);
      cert.add_check("solution bounded away from zero", "Liv", lower);
    } else {
      cert.add_check("non-negative data", "NHL4", std::min(lower, signs.second ? -1.0 : 0.0));
    }
  }

  const TimeFunction Lbar = [Lt](double t) { return Lt(t / 4.0); };
  try {
    const double T0 = unbounded_drift_schedule(k.c0, k.M1, sc.domain, z0, opt.eps0, 1, opt.schedule).T0;
    cert.set("T0", T0);
    cert.add_check("drift start time", "T0choice", 0.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotIncreasing && e.code() != ErrorCode::NoValidT0) throw;
    cert.add_check(e.code() == ErrorCode::NotIncreasing ? "increasing drift growth" : "drift start time",
                   e.code() == ErrorCode::NotIncreasing ? "Ni" : "T0choice", -1.0);
  }
  cert.set("eps0", opt.eps0);
  const auto rep = condition_report(z0, Lbar, k.c0, d, opt.conditions);
  cert.add_check("divergent drift weight", "z2cond", rep.partial_integral - opt.conditions.threshold);
  cert.add_check("monotone weighted data", "monocond", rep.monotone_sign != 0 ? 0.0 : -1.0);
  double ell = 0.0;
  cert.add_check("weighted data vanish", "Llim",
                 limit_margin(Lbar, z0, k.c0, d, opt.conditions.t_begin, opt.schedule.horizon, ell));
  cert.set("ell", ell);
  cert.final_bound = BoundCertificate::kInfinity;
  return cert;
}

}  // namespace driftbound
