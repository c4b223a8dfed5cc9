#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "driftbound/bounds.hpp"
#include "driftbound/error.hpp"

using namespace driftbound;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::ConfigError;
}

// Direct evaluation of the expanded sum of products.
double brute_J(const std::vector<double>& eta, const std::vector<double>& Lambda, double J0, std::size_t k) {
  double total = 0.0;
  for (std::size_t m = 0; m <= k; ++m) {
    double prod = 1.0;
    for (std::size_t j = m + 1; j <= k; ++j) prod *= eta[j - 1];
    total += prod * (m == 0 ? J0 : Lambda[m - 1]);
  }
  return total;
}

}  // namespace

TEST_CASE("max principle envelope") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(max_principle_envelope([](double) { return 1.0; }, [](double) { return 0.0; }, 3.7) == 1.0);
  CHECK(max_principle_envelope([](double) { return 0.5; }, [](double t) { return std::exp(-t); }, inf) ==
        doctest::Approx(1.5).epsilon(1e-8));
  CHECK(max_principle_envelope([](double) { return 0.0; }, [](double) { return 0.7; }, 4.0) ==
        doctest::Approx(2.8).epsilon(1e-12));
  CHECK(max_principle_envelope([](double) { return 1.0; }, [](double) { return 0.25; }, 2.0, Direction::Lower) ==
        doctest::Approx(0.5));
  CHECK(std::isinf(max_principle_envelope([](double) { return 0.0; }, [](double t) { return 1.0 / (1.0 + t); }, inf)));
  CHECK(code_of([] {
          (void)max_principle_envelope([](double) { return 0.0; }, [](double t) { return 0.5 - t; }, 1.0);
        }) == ErrorCode::NegativeForcingMajorant);
}

TEST_CASE("global range") {
  const auto r = global_range(2.0, 0.3, 1.0, 0.4);
  CHECK(r.upper == doctest::Approx(2.3));
  CHECK(r.lower == doctest::Approx(0.6));
  const auto z = global_range(2.0, 0.0, 1.0, 0.0);
  CHECK(z.upper == 2.0);
  CHECK(z.lower == 1.0);
}

TEST_CASE("growth parameters") {
  auto g = growth_params(1, 2, 1, 1, 2, 0.5);
  CHECK(g.beta_star == 2.0);
  CHECK(g.beta == 2.0);
  CHECK(g.T_star == 0.5);
  CHECK(g.eta_star == doctest::Approx(0.9375).epsilon(1e-15));

  g = growth_params(1, 2, 1, 1, 2, 0.25);
  CHECK(g.beta == 4.0);
  CHECK(g.T_star == 0.25);
  CHECK(g.eta_star == doctest::Approx(1.0 - std::pow(0.5, 8)).epsilon(1e-15));

  CHECK(code_of([] { (void)growth_params(1, 2, 1, 2, 2, 0.5); }) == ErrorCode::BadGeometry);

  // eta grows with beta (shorter T) and with R / r0.
  double prev = 0.0;
  for (double T : {2.0, 1.0, 0.5, 0.25, 0.1}) {
    const auto p = growth_params(1, 1, 0, 1, 2, T);
    CHECK(p.T_star <= T);
    CHECK(p.eta_star >= prev);
    prev = p.eta_star;
  }
  prev = 0.0;
  for (double R : {1.5, 2.0, 3.0, 5.0}) {
    const auto p = growth_params(1, 1, 0, 1, R, 1.0);
    CHECK(p.eta_star > prev);
    prev = p.eta_star;
  }
}

TEST_CASE("iterated growth bound") {
  const std::vector<double> half(2, 0.5), ones(2, 1.0);
  auto it = iterate_growth(half, ones, 1.0);
  CHECK(it[1].J == doctest::Approx(1.75));
  CHECK(it[1].interval == doctest::Approx(it[0].J + 1.0));

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> eta_dist(0.05, 0.999), lam_dist(0.0, 3.0), k_dist(1, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const auto K = static_cast<std::size_t>(k_dist(gen));
    std::vector<double> eta(K), lam(K);
    for (std::size_t i = 0; i < K; ++i) {
      eta[i] = eta_dist(gen);
      lam[i] = trial % 4 == 0 ? 0.0 : lam_dist(gen);
    }
    const double J0 = lam_dist(gen);
    const auto got = iterate_growth(eta, lam, J0);
    for (std::size_t k = 1; k <= K; ++k) {
      const double want = brute_J(eta, lam, J0, k);
      CHECK(std::abs(got[k - 1].J - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }

  // Partial sums stay below the geometric tail.
  std::uniform_real_distribution<double> below(0.0, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> eta(80, 0.7), lam(80);
    for (auto& l : lam) l = below(gen);
    const auto got = iterate_growth(eta, lam, 0.5);
    for (const auto& g : got) CHECK(g.J <= geometric_tail(0.7, 0.8) + 0.5 + 1e-9);
  }
}

TEST_CASE("geometric tail") {
  CHECK(geometric_tail(0.5, 1.0) == 2.0);
  CHECK(geometric_tail(0.5, 0.0) == 0.0);
  CHECK(geometric_tail(0.9, 0.1) == doctest::Approx(1.0));
  const std::vector<double> eta(60, 0.5), lam(60, 1.0);
  CHECK(std::abs(iterate_growth(eta, lam, 1.0).back().J - 2.0) < 1e-6);
}

TEST_CASE("bounded drift envelope") {
  const Domain dom = Domain::interval(0.0, 1.0);
  const auto x0 = barrier_center(dom, 2.0);
  CHECK(bounded_drift_envelope(1, 1, 0, dom, x0, 0.0, 0.0).bound == 0.0);
  CHECK(bounded_drift_bound(0.5, 0.1, 0.2) == doctest::Approx(0.9));
  CHECK(std::isinf(bounded_drift_bound(1.0, 0.1, 0.2)));
  const auto e = bounded_drift_envelope(1, 1, 0, dom, x0, 0.1, 0.2);
  CHECK(e.R == doctest::Approx(2.0));
  CHECK(e.r0 == doctest::Approx(1.0));
  CHECK(e.T_star == doctest::Approx(2.0));
  CHECK(e.eta_star == doctest::Approx(0.5));
  CHECK(e.bound == doctest::Approx(0.9));
}

TEST_CASE("drift exponent and T0 search") {
  CHECK(drift_exponent(1, 0, 1, 2) == doctest::Approx(4.0 * std::log(2.0)));

  const Domain dom = Domain::interval(0.0, 1.0);
  const auto s = unbounded_drift_schedule(1, 0, dom, [](double t) { return t + 2.0; }, 0.01, 10);
  // Bisection on the exact condition Z(z) - z - 1/2 = 0.01 (decreasing in z).
  double lo = 2.5, hi = 1000.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (drift_exponent(1, 0, 1, mid) - mid - 0.5 > 0.01 ? lo : hi) = mid;
  }
  const double t_exact = hi - 2.0;
  CHECK(t_exact == doctest::Approx(32.07).epsilon(1e-3));
  CHECK(s.T0 >= t_exact);
  CHECK(s.T0 <= t_exact * std::pow(10.0, 1.0 / 512.0));

  CHECK(code_of([&] { (void)unbounded_drift_schedule(1, 0, dom, [](double) { return 5.0; }, 0.01, 3); }) ==
        ErrorCode::NotIncreasing);
  CHECK(code_of([&] {
          (void)unbounded_drift_schedule(1, 0, dom, [](double t) { return 3.0 - 1e-3 * t; }, 0.01, 3);
        }) == ErrorCode::NotIncreasing);
  // Z - z - 1/2 ~ 1/(3z) stays above 1e-6 for z0 ~ ln t.
  CHECK(code_of([&] {
          (void)unbounded_drift_schedule(1, 0, dom, [](double t) { return 2.0 + std::log(t + 1.0); }, 1e-6, 3);
        }) == ErrorCode::NoValidT0);
}

TEST_CASE("schedule invariants") {
  const Domain dom = Domain::box(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.1, 0.05));
  const TimeFunction families[] = {[](double t) { return std::log(std::exp(1.0) + t); },
                                   [](double t) { return 1.0 + std::log(std::log(std::exp(1.0) + t)); },
                                   [](double t) { return 1.0 + 0.5 * t; }};
  for (const auto& z0 : families) {
    const auto s = unbounded_drift_schedule(1.0, 0.01, dom, z0, 0.01, 500);
    REQUIRE(s.steps.size() == 500);
    const double d = diameter(dom);
    for (const auto& st : s.steps) {
      CHECK(std::abs(4.0 * st.beta_k * st.tau_k - st.R_k * st.R_k) <= 1e-12 * st.R_k * st.R_k);
      CHECK(st.tau_k >= 0.25);
      CHECK(st.tau_k <= 0.5);
      CHECK(st.T_k >= s.T0 + st.k / 4.0);
      CHECK(st.T_k <= s.T0 + st.k / 2.0);
      const auto ext = radial_extents(dom, st.center);
      CHECK(ext.R_star == doctest::Approx(st.R_k));
      CHECK(ext.r_star == doctest::Approx(st.R_k - d));
      CHECK(st.eta_k > 0.0);
      CHECK(st.eta_k < 1.0);
    }
  }
}

TEST_CASE("unbounded drift envelope") {
  CHECK(unbounded_drift_bound(0.0, 1, 1) == 0.0);
  CHECK(unbounded_drift_bound(2.0, 1, 1) == doctest::Approx(2.0 * std::exp(0.5)));
  // Lambda_bar e^{z0} = L exactly for ex1_iii, alpha = delta = 0, c0 = d = 1.
  const auto e = unbounded_drift_envelope([](double t) { return 0.7 / t; }, [](double t) { return std::log(t); }, 1, 1,
                                          100.0, 1000.0);
  CHECK(e.ell == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(e.bound == doctest::Approx(0.7 * std::exp(0.5)).epsilon(1e-12));
}

TEST_CASE("example families") {
  FamilyParams p;
  p.kind = FamilyKind::Ex1iii;
  p.alpha = 0.0;
  p.L = 1.3;
  auto r = example_family(p);
  CHECK(r.ell == 1.3);
  CHECK(r.z0.at_time(50.0) == doctest::Approx(std::log(50.0)));
  CHECK(r.Lambda_bar.at_time(50.0) == doctest::Approx(1.3 / 50.0));
  CHECK(r.report.pass());
  CHECK(r.report.monotone_sign == -1);

  p.delta = 0.5;
  CHECK(example_family(p).ell == 0.0);

  FamilyParams q;
  q.kind = FamilyKind::Ex2;
  q.alpha = q.beta = q.gamma = 1.0;
  r = example_family(q);
  CHECK(r.ell == 0.0);
  CHECK(r.report.pass());
  CHECK(r.report.monotone_sign == 1);

  FamilyParams bad;
  bad.kind = FamilyKind::Ex1ii;
  bad.gamma = 1.0;  // equals c0/d
  try {
    (void)example_family(bad);
    FAIL("expected HypothesisFailed");
  } catch (const HypothesisFailed& e) {
    CHECK(e.quote_key() == "ex1");
    CHECK(e.assumption() == "drift growth rate below c0/d");
  }
  bad.kind = FamilyKind::Ex1iii;
  bad.alpha = 1.0;
  CHECK(code_of([&] { (void)example_family(bad); }) == ErrorCode::HypothesisFailed);
  bad.kind = FamilyKind::Ex1i;
  bad.c0 = 0.0;
  CHECK(code_of([&] { (void)example_family(bad); }) == ErrorCode::BadParameter);
}

TEST_CASE("family sweep passes the condition report") {
  for (double delta : {0.0, 0.5}) {
    for (double gamma : {0.5, 1.0, 2.0}) {
      FamilyParams p;
      p.kind = FamilyKind::Ex1i;
      p.gamma = gamma;
      p.delta = delta;
      const auto r = example_family(p);
      CHECK_MESSAGE(r.report.pass(), "ex1_i gamma=" << gamma);
      CHECK(r.ell == (delta == 0.0 ? 1.0 : 0.0));
    }
    for (double gamma : {0.3, 0.9}) {
      for (double alpha : {-1.0, 0.0, 1.0}) {
        FamilyParams p;
        p.kind = FamilyKind::Ex1ii;
        p.gamma = gamma;
        p.alpha = alpha;
        p.delta = delta;
        CHECK_MESSAGE(example_family(p).report.pass(), "ex1_ii gamma=" << gamma << " alpha=" << alpha);
      }
    }
    for (double alpha : {-0.5, 0.0, 0.5}) {
      FamilyParams p;
      p.kind = FamilyKind::Ex1iii;
      p.alpha = alpha;
      p.delta = delta;
      CHECK_MESSAGE(example_family(p).report.pass(), "ex1_iii alpha=" << alpha);
    }
  }
  for (double alpha : {0.5, 1.0, 2.0}) {
    FamilyParams p;
    p.kind = FamilyKind::Ex2;
    p.alpha = alpha;
    p.beta = 0.5;
    p.gamma = 2.0;
    const auto r = example_family(p);
    CHECK_MESSAGE(r.report.pass(), "ex2 alpha=" << alpha);
    CHECK(r.ell == 0.0);
  }
}
