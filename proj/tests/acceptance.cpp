// One line per acceptance criterion. Usage: acceptance CLI_BINARY CONFIG_DIR
// Exit status 0 iff every criterion passes within its runtime budget.

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "driftbound/config.hpp"
#include "driftbound/transform.hpp"

namespace fs = std::filesystem;
using namespace driftbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename... Args>
  void add(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  void require(bool ok, const char* what) {
    if (!ok) {
      pass_ = false;
      add("FAILED %s", what);
    }
  }
  [[nodiscard]] Outcome done() const { return {pass_, text_}; }

 private:
  bool pass_ = true;
  std::string text_;
};

std::string g_cli;
fs::path g_configs;
fs::path g_scratch;

TimeSeries run(const Scenario& sc, int nodes, double t_end, double sample_dt) {
  SimulateOptions opt;
  opt.resolution = {nodes};
  opt.t_end = t_end;
  opt.sample_dt = sample_dt;
  return simulate(sc, opt).series;
}

GrowthParams heat_growth(double T) {
  const Domain dom = Domain::interval(0, 1);
  const Point x0 = barrier_center(dom, 2.0);
  const auto ext = radial_extents(dom, x0);
  return growth_params(1.0, 1.0, 0.0, ext.r_star, ext.R_star, T);
}

Outcome growth_contraction() {
  Detail d;
  const auto g = heat_growth(2.0);
  d.require(std::abs(g.beta_star - 0.5) < 1e-14 && std::abs(g.T_star - 2.0) < 1e-14 &&
                std::abs(g.eta_star - 0.5) < 1e-14,
            "hand values beta*=1/2, T*=2, eta*=1/2");
  Scenario sc = make_heat_scenario(Domain::interval(0, 1));
  sc.u0 = Expr::parse("sin(pi*x1)");
  const auto ts = run(sc, 401, g.T_star, g.T_star);
  const double u0 = ts.samples.front().max_u, uT = ts.samples.back().max_u;
  d.add("max u(T*)=%.3g <= %.4g", uT, g.eta_star * u0 + 2e-3);
  d.require(uT <= g.eta_star * u0 + 2e-3, "contraction");
  return d.done();
}

Outcome inhomogeneous_growth() {
  Detail d;
  const auto g = heat_growth(2.0);
  Scenario sc = make_heat_scenario(Domain::interval(0, 1));
  sc.u0 = Expr::parse("sin(pi*x1)");
  sc.f = Expr::constant(0.3);
  sc.g = Expr::constant(0.1);
  const auto ts = run(sc, 401, g.T_star, g.T_star);
  const double u0 = std::max(0.0, ts.samples.front().max_u);
  const double uT = std::max(0.0, ts.samples.back().max_u);
  const double bound = g.eta_star * u0 + 0.1 + 0.3 * g.T_star + 2e-3;
  d.add("max u+(T*)=%.4g <= %.4g", uT, bound);
  d.require(uT <= bound, "inhomogeneous contraction");
  return d.done();
}

Outcome forced_envelope() {
  Detail d;
  Scenario sc = make_heat_scenario(Domain::interval(0, 1));
  sc.u0 = Expr::constant(0.5);
  sc.g = Expr::parse("0.5*cos(3*t)");
  sc.f = Expr::parse("exp(-t)*sin(pi*x1)");
  CertifyOptions opt;
  opt.t_end = 5.0;
  opt.F = Expr::parse("exp(-t)");
  const auto cert = max_principle_certificate(sc, opt);
  d.require(cert.checks_pass(), "hypothesis checks");
  const auto ts = run(sc, 101, 5.0, 0.05);
  double worst = -INFINITY;
  for (const auto& s : ts.samples) worst = std::max(worst, s.max_abs_u - (0.5 + 1.0 - std::exp(-s.t)));
  d.add("%zu samples, worst max|u| - (0.5 + 1 - e^-t) = %.3g", ts.samples.size(), worst);
  d.require(worst <= 2e-3, "closed-form envelope");
  d.require(check_envelope(ts, cert, 2e-3).pass, "certificate envelope");
  return d.done();
}

Outcome recursion_oracle() {
  Detail d;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(unit(rng) * 50);
    std::vector<double> eta(static_cast<std::size_t>(k)), lam(eta.size());
    for (auto& e : eta) e = unit(rng);
    for (auto& l : lam) l = 2.0 * unit(rng);
    const double J0 = 3.0 * unit(rng);
    const auto it = iterate_growth(eta, lam, J0);
    for (int n = 1; n <= k; ++n) {
      // J_n = prod_{j<=n} eta_j J0 + sum_m Lambda_m prod_{m<j<=n} eta_j
      double prod = J0;
      for (int j = 0; j < n; ++j) prod *= eta[static_cast<std::size_t>(j)];
      double sum = 0.0;
      for (int m = 0; m < n; ++m) {
        double p = lam[static_cast<std::size_t>(m)];
        for (int j = m + 1; j < n; ++j) p *= eta[static_cast<std::size_t>(j)];
        sum += p;
      }
      const double exact = prod + sum;
      worst = std::max(worst, std::abs(it[static_cast<std::size_t>(n - 1)].J - exact) / std::max(exact, 1e-300));
    }
  }
  d.add("worst relative error %.2g", worst);
  d.require(worst <= 1e-12, "brute force agreement");
  const std::vector<double> half(60, 0.5), one(60, 1.0);
  const double J60 = iterate_growth(half, one, 0.0).back().J;
  d.add("geometric J_60=%.12g", J60);
  d.require(std::abs(J60 - 2.0) <= 1e-6 && std::abs(geometric_tail(0.5, 1.0) - 2.0) < 1e-15, "geometric limit 2");
  return d.done();
}

Outcome schedule_validity() {
  Detail d;
  const Domain dom = Domain::box(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.1, 0.05));
  const std::pair<const char*, TimeFunction> families[] = {
      {"ln(e+t)", [](double t) { return std::log(std::exp(1.0) + t); }},
      {"1+lnln(e+t)", [](double t) { return 1.0 + std::log(std::log(std::exp(1.0) + t)); }},
      {"1+t/2", [](double t) { return 1.0 + 0.5 * t; }}};
  for (const auto& [name, z0] : families) {
    const auto s = unbounded_drift_schedule(1.0, 0.01, dom, z0, 0.01, 500);
    bool ok = s.steps.size() == 500;
    for (const auto& st : s.steps) {
      ok = ok && std::abs(4.0 * st.beta_k * st.tau_k - st.R_k * st.R_k) <= 1e-12 * st.R_k * st.R_k;
      ok = ok && st.tau_k >= 0.25 && st.tau_k <= 0.5;
      ok = ok && st.T_k >= s.T0 + st.k / 4.0 && st.T_k <= s.T0 + st.k / 2.0;
    }
    d.add("%s T0=%.4g", name, s.T0);
    d.require(ok, name);
  }
  return d.done();
}

Outcome family_conditions() {
  Detail d;
  int count = 0;
  auto check = [&](const FamilyParams& p, double ell) {
    const auto r = example_family(p);
    ++count;
    if (!r.report.pass() || r.ell != ell) {
      d.require(false, std::string(to_string(p.kind)).c_str());
    }
  };
  for (double delta : {0.0, 0.5}) {
    const double ell = delta == 0.0 ? 1.0 : 0.0;
    for (double gamma : {0.5, 1.0, 2.0}) check({FamilyKind::Ex1i, gamma, 0.0, 1.0, 1.0, delta, 1.0, 1.0}, ell);
    for (double gamma : {0.3, 0.9}) {
      for (double alpha : {-1.0, 0.0, 1.0}) check({FamilyKind::Ex1ii, gamma, alpha, 1.0, 1.0, delta, 1.0, 1.0}, ell);
    }
    for (double alpha : {-0.5, 0.0, 0.5}) check({FamilyKind::Ex1iii, 1.0, alpha, 1.0, 1.0, delta, 1.0, 1.0}, ell);
  }
  for (double alpha : {0.5, 1.0, 2.0}) check({FamilyKind::Ex2, 2.0, alpha, 0.5, 1.0, 0.0, 1.0, 1.0}, 0.0);
  d.add("%d parameter sets", count);
  return d.done();
}

Outcome transform_inequalities() {
  Detail d;
  PresetBase base;
  base.A = SymmetricExprMatrix::identity(1);
  base.K0 = ExprMatrix::identity(1);
  base.B0 = {Expr::constant(0.5)};
  base.u0 = Expr::parse("1.5 + 0.3*sin(pi*x1)");
  base.g = Expr::parse("1 + 0.5*exp(-t)");
  base.f = Expr::parse("exp(-2*t)");
  base.u_star = 1.0;
  base.constants.c2 = 0.2;
  PresetParams pp;
  pp.kind = PresetKind::SlightlyCompressible;
  pp.kappa = 5.0;
  const Scenario sc = preset(pp, base);
  double prev1 = -1.0, prev2 = -1.0;
  for (int nodes : {51, 101, 201}) {
    ResidualAccumulator lw1(sc, Transform(sc.p_family, 0.1), Inequality::Lw1, 53, false);
    ResidualAccumulator lw2(sc, Transform(sc.p_family, -0.2), Inequality::Lw2, 53, false);
    SimulateOptions opt;
    opt.resolution = {nodes};
    opt.t_end = 0.2;
    opt.sample_dt = 0.1;
    opt.observer = [&](const GridState& s) {
      lw1.push(s);
      lw2.push(s);
    };
    (void)simulate(sc, opt);
    const double v1 = lw1.field().violation(Inequality::Lw1);
    const double v2 = lw2.field().violation(Inequality::Lw2);
    d.add("%d nodes: Lw1 %.2g, Lw2 %.2g", nodes, v1, v2);
    if (prev1 >= 0.0) d.require(v1 <= 0.5 * prev1 || v1 == 0.0, "Lw1 tolerance halves");
    if (prev2 >= 0.0) d.require(v2 <= 0.5 * prev2 || v2 == 0.0, "Lw2 tolerance halves");
    prev1 = v1;
    prev2 = v2;
  }
  return d.done();
}

Outcome nonlinear_convergence() {
  Detail d;
  const RunConfig cfg = load_config_file((g_configs / "nhl1_compressible.json").string());
  const auto cert = run_certify(cfg);
  d.require(cert.checks_pass(), "hypothesis checks");
  d.add("mu2=%.4g C1=%.4g C2=%.4g eta*=%.4g", cert.get("mu2"), cert.get("C1"), cert.get("C2"), cert.get("eta_star"));
  const auto ts = run(cfg.scenario, 101, 30.0, 0.1);
  double tail = 0.0;
  for (const auto& s : ts.samples) {
    if (s.t >= 0.8 * 30.0) tail = std::max(tail, s.max_dev_ustar);
  }
  d.add("tail sup %.3g", tail);
  d.require(tail <= 1e-2, "tail sup <= 1e-2");
  const auto rep = check_envelope(ts, cert, 2e-3);
  d.require(rep.pass && rep.tail_checked, "envelope domination on the tail");
  return d.done();
}

Outcome heat_kernel() {
  Detail d;
  auto err = [](int nodes) {
    Scenario sc = make_heat_scenario(Domain::interval(0, 1));
    sc.u0 = Expr::parse("sin(pi*x1)");
    return std::abs(run(sc, nodes, 0.1, 0.1).samples.back().max_u - std::exp(-std::numbers::pi * std::numbers::pi * 0.1));
  };
  const double e1 = err(101), e2 = err(201), e3 = err(401);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  d.add("errors %.2e %.2e %.2e, orders %.3f %.3f", e1, e2, e3, p1, p2);
  d.require(e3 <= 2e-3, "error at 401 nodes");
  d.require(p1 >= 1.9 && p2 >= 1.9, "order >= 1.9");
  return d.done();
}

int run_cli(const std::string& command, const std::string& config, const fs::path& out) {
  const std::string cmd = "'" + g_cli + "' " + command + " '" + (g_configs / config).string() + "' --out '" +
                          out.string() + "' >/dev/null 2>'" + (out.string() + ".stderr") + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome negative_controls() {
  Detail d;
  struct Case {
    const char* command;
    const char* config;
    const char* quote_key;
  };
  for (const Case& c : {Case{"certify", "nhl1_divergent.json", "fc2"}, Case{"families", "ex1ii_gamma_too_large.json", "ex1"},
                        Case{"certify", "radius_too_small.json", "choicey"}}) {
    const fs::path out = g_scratch / fs::path(c.config).stem();
    const int code = run_cli(c.command, c.config, out);
    std::string assumption;
    std::ifstream in(out / "manifest.json");
    if (in) {
      const auto m = nlohmann::json::parse(in);
      for (const auto& f : m.at("failures")) {
        if (f.value("quote_key", "") == c.quote_key) assumption = f.value("assumption", "");
      }
    }
    d.add("%s exit %d [%s] %s", c.config, code, c.quote_key, assumption.c_str());
    d.require(code == 1 && !assumption.empty(), c.config);
  }
  return d.done();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s CLI_BINARY CONFIG_DIR\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_configs = argv[2];
  g_scratch = fs::temp_directory_path() / "driftbound_acceptance";
  fs::create_directories(g_scratch);

  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> body;
  };
  const Criterion criteria[] = {
      {1, "growth lemma contraction", 5.0, growth_contraction},
      {2, "inhomogeneous growth lemma", 5.0, inhomogeneous_growth},
      {3, "maximum principle envelope", 5.0, forced_envelope},
      {4, "iterated recursion oracle", 1.0, recursion_oracle},
      {5, "unbounded drift schedule", 1.0, schedule_validity},
      {6, "example families", 5.0, family_conditions},
      {7, "transform inequalities", 30.0, transform_inequalities},
      {8, "nonlinear convergence", 60.0, nonlinear_convergence},
      {9, "heat kernel regression", 10.0, heat_kernel},
      {10, "negative controls", 1.0, negative_controls},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && secs < c.budget;
    if (!ok) ++failed;
    std::printf("criterion %2d %s: %s (%.2f s, budget %g s) %s\n", c.id, c.name, ok ? "PASS" : "FAIL", secs, c.budget,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
