#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "driftbound/certify.hpp"
#include "driftbound/error.hpp"
#include "driftbound/solver.hpp"

using namespace driftbound;

namespace {

Scenario compressible(const std::string& u0, const std::string& g, const std::string& f) {
  PresetBase base;
  base.A = SymmetricExprMatrix::identity(1);
  base.K0 = ExprMatrix::identity(1);
  base.B0 = {Expr::constant(0.5)};
  base.u0 = Expr::parse(u0);
  base.g = Expr::parse(g);
  base.f = Expr::parse(f);
  base.u_star = 1.0;
  base.constants.c2 = 0.2;
  base.constants.cB = 0.5;
  base.constants.gamma0 = 1.0;
  PresetParams p;
  p.kind = PresetKind::SlightlyCompressible;
  p.kappa = 5.0;
  return preset(p, base);
}

TimeSeries run(const Scenario& sc, int nodes, double t_end, double sample_dt) {
  SimulateOptions opt;
  opt.resolution = {nodes};
  opt.t_end = t_end;
  opt.sample_dt = sample_dt;
  return simulate(sc, opt).series;
}

}  // namespace

TEST_CASE("max principle certificate dominates a forced run") {
  Scenario sc = make_heat_scenario(Domain::interval(0, 1));
  sc.u0 = Expr::parse("0.5");
  sc.g = Expr::parse("0.5*cos(3*t)");
  sc.f = Expr::parse("exp(-t)*sin(pi*x1)");
  CertifyOptions opt;
  opt.t_end = 5.0;
  opt.envelope_dt = 0.05;
  opt.F = Expr::parse("exp(-t)");
  const auto cert = max_principle_certificate(sc, opt);
  CHECK(cert.checks_pass());
  CHECK(cert.get("mu1") == doctest::Approx(0.5));
  for (const auto& e : cert.envelope) CHECK(e.bound == doctest::Approx(0.5 + 1.0 - std::exp(-e.t)).epsilon(1e-7));
  const auto series = run(sc, 101, 5.0, 0.05);
  const auto rep = check_envelope(series, cert, 2e-3);
  CHECK(rep.pass);
  CHECK(rep.pointwise_checked);
  CHECK(rep.checked == series.samples.size());

  // A majorant below |f| is caught by the fc1 check.
  opt.F = Expr::parse("0.5*exp(-t)");
  CHECK_FALSE(max_principle_certificate(sc, opt).checks_pass());
}

TEST_CASE("bounded drift certificate") {
  Scenario sc = make_heat_scenario(Domain::interval(0, 1));
  sc.drift = {Expr::parse("0.5")};
  sc.constants.M2 = 0.5;
  sc.u0 = Expr::parse("sin(pi*x1)");
  sc.g = Expr::parse("0.2*sin(pi*x1)*0 + 0.2*(1-exp(-t))");
  sc.f = Expr::parse("0.1*exp(-t)");
  CertifyOptions opt;
  opt.t_end = 20.0;
  const auto cert = bounded_drift_certificate(sc, opt);
  CHECK(cert.checks_pass());
  // R = 2, r0 = 1, beta* = (1 + 0.5*2)/2 = 1, T* = 1, eta* = 1 - 1/4.
  CHECK(cert.get("T_star") == doctest::Approx(1.0));
  CHECK(cert.get("eta_star") == doctest::Approx(0.75));
  CHECK(cert.steps.size() == 20);
  const double b = cert.get("boundary_limsup"), f = cert.get("forcing_limsup");
  CHECK(cert.final_bound == doctest::Approx(5.0 * (b + f)));
  const auto rep = check_envelope(run(sc, 101, 20.0, 0.1), cert, 2e-3);
  CHECK(rep.pass);
  CHECK(rep.tail_checked);
}

TEST_CASE("unbounded drift certificate") {
  Scenario sc = make_heat_scenario(Domain::interval(0, 0.1));
  sc.constants.z0 = Expr::parse("10*ln(t+e)");
  sc.drift = {Expr::parse("5*ln(t+e)*x1")};
  sc.u0 = Expr::parse("sin(10*pi*x1)");
  CertifyOptions opt;
  opt.t_end = 6.0;
  opt.Lambda_bar = Expr::parse("pow(t+e, -2)");
  const auto cert = unbounded_drift_certificate(sc, opt);
  for (const auto& c : cert.checks) CHECK_MESSAGE(c.pass, c.assumption << " margin " << c.margin);
  CHECK(cert.get("T0") < 1.0);
  CHECK(!cert.steps.empty());
  CHECK(cert.steps.front().eta_k < 0.8);
  // ell = sup (t+e)^-2 (t+e)^1 over the window, attained at its start.
  CHECK(cert.get("ell") == doctest::Approx(1.0 / (4.8 + std::exp(1.0))).epsilon(1e-9));
  const auto rep = check_envelope(run(sc, 21, 6.0, 0.05), cert, 2e-3);
  CHECK(rep.pass);
}

TEST_CASE("NHL1 ledger on the slightly compressible scenario") {
  const Scenario sc = compressible("1 + 0.5*sin(pi*x1)", "1 + 0.5*exp(-t)", "exp(-2*t)");
  CertifyOptions opt;
  opt.t_end = 30.0;
  opt.F = Expr::parse("exp(-2*t)");
  const auto cert = nonlinear_certificate(sc, NonlinearMode::NHL1, opt);
  for (const auto& c : cert.checks) CHECK_MESSAGE(c.pass, c.assumption << " margin " << c.margin);
  CHECK(cert.get("mu1") == doctest::Approx(1.5));
  CHECK(cert.get("mu0") == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(cert.get("mu2") == cert.get("mu1") + cert.get("mu0"));
  CHECK(cert.get("m_star") == doctest::Approx(1.0));
  CHECK(cert.get("M_star") == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(cert.get("mu3") == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  CHECK(cert.get("lambda1") == doctest::Approx(0.1));
  CHECK(cert.get("lambda2") == doctest::Approx(-0.2));
  CHECK(cert.get("mu4") == 0.5 * std::pow(1.0 + cert.get("mu2"), 1.0));
  const double mu3 = cert.get("mu3");
  CHECK(cert.get("C1") * cert.get("C2") == doctest::Approx(std::exp(mu3 * (0.2 - 0.2))));
  CHECK(cert.certified_limit == 0.0);
  CHECK(cert.finite());
}

TEST_CASE("NHL1 envelope on a homogeneous run is zero") {
  Scenario sc = compressible("1", "1", "0");
  CertifyOptions opt;
  opt.t_end = 5.0;
  opt.F = Expr::parse("0");
  const auto cert = nonlinear_certificate(sc, NonlinearMode::NHL1, opt);
  CHECK(cert.checks_pass());
  CHECK(cert.get("mu0") == 0.0);
  for (const auto& e : cert.envelope) CHECK(e.bound == 0.0);
  CHECK(cert.final_bound == 0.0);
}

TEST_CASE("NHL1 negative controls") {
  Scenario sc = compressible("1 + 0.5*sin(pi*x1)", "1 + 0.5*exp(-t)", "1/(1+t)");
  CertifyOptions opt;
  opt.t_end = 5.0;
  opt.F = Expr::parse("1/(1+t)");
  try {
    (void)nonlinear_certificate(sc, NonlinearMode::NHL1, opt);
    FAIL("expected HypothesisFailed");
  } catch (const HypothesisFailed& e) {
    CHECK(e.quote_key() == "fc2");
  }

  sc = compressible("1 + sin(pi*x1)*0 - 0.9*sin(pi*x1)", "1", "-exp(-t)");
  opt.F = Expr::parse("exp(-t)");
  try {
    (void)nonlinear_certificate(sc, NonlinearMode::NHL1, opt);
    FAIL("expected RangeViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RangeViolation);
  }
}

TEST_CASE("NHL3 with doubly logarithmic profiles") {
  // Profiles shifted by 16 so ln ln stays positive from t = 0. The narrow
  // domain keeps e^{d z0} slower than the decay of Lambda_tilde.
  Scenario sc = compressible("1 + 0.5*sin(10*pi*x1)", "1 + 0.5/(t+16)",
                             "1/((t+16)*ln(t+16)*pow(lnln(t+16), 0.5))");
  sc.domain = Domain::interval(0, 0.1);
  sc.constants.b_bar = Expr::parse("0.5");
  CertifyOptions opt;
  opt.t_end = 10.0;
  opt.F = Expr::parse("1/((t+16)*ln(t+16)*pow(lnln(t+16), 0.5))");
  opt.calF = Expr::parse("4*pow(lnln(t+16), 0.5)");
  opt.Lambda_tilde = Expr::parse("4/(t+16)");
  const auto cert = nonlinear_certificate(sc, NonlinearMode::NHL3, opt);
  for (const auto& c : cert.checks) CHECK_MESSAGE(c.pass, c.assumption << " margin " << c.margin);
  CHECK(cert.get("mu1") == doctest::Approx(2.5));
  CHECK(cert.get("mu2") == doctest::Approx(3.5));
  CHECK(cert.get("T0") > 1000.0);
  CHECK(cert.certified_limit == 0.0);
  CHECK_FALSE(cert.finite());

  // A unit domain pushes the start time past the search horizon.
  sc.domain = Domain::interval(0, 1);
  sc.u0 = Expr::parse("1 + 0.5*sin(pi*x1)");
  const auto wide = nonlinear_certificate(sc, NonlinearMode::NHL3, opt);
  CHECK_FALSE(wide.checks_pass());
}
