#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "driftbound/expr.hpp"
#include "driftbound/geometry.hpp"

namespace driftbound {

using TimeFunction = std::function<double(double)>;

/// Upper: G = max of the data, result bounds u from above.
/// Lower: G = min of the data, result G - int F bounds u from below.
/// Abs:   G = max of |data|, result bounds |u|.
enum class Direction { Upper, Lower, Abs };

/// G(t) +- int_0^t F. t may be +inf, in which case the integral is taken to
/// infinity and a divergent integral gives +inf (-inf for Lower). Throws
/// NegativeForcingMajorant if F is negative at a quadrature node.
double max_principle_envelope(const TimeFunction& G, const TimeFunction& F, double t,
                              Direction dir = Direction::Abs);

struct Range {
  double upper;
  double lower;
};

/// Global a-priori range of u from m1 = max(sup u0, sup g), m2 = min(inf u0,
/// inf g) and the integrals of the majorants of f+ and f-.
Range global_range(double m1, double m1_tilde, double m2, double m2_tilde);

struct GrowthParams {
  double beta_star;
  double beta;
  double T_star;
  double eta_star;
};

/// Contraction factor of the growth lemma for the annulus r0 < |x - x0| < R.
/// Throws BadGeometry if r0 >= R, BadParameter for non-positive c0, r0 or T.
GrowthParams growth_params(double c0, double M1, double M2, double r0, double R, double T);

struct GrowthStep {
  int k = 0;
  double T_k = 0.0;
  double tau_k = 0.0;
  Point center;
  double r_k = 0.0;
  double R_k = 0.0;
  double m_k = 0.0;
  double beta_k = 0.0;
  double eta_k = 0.0;
};

enum class ScheduleMode { Bounded, Unbounded };

struct GrowthSchedule {
  double T0 = 0.0;
  std::vector<GrowthStep> steps;
  ScheduleMode mode = ScheduleMode::Bounded;
};

struct GrowthIterate {
  double J;         // bound on max w+ at T_k
  double interval;  // bound on max w+ over [T_{k-1}, T_k]
};

/// J_k = eta_k J_{k-1} + Lambda_k with J_0 = J0, for k = 1..eta.size().
/// Lambda[k-1] is Lambda_k. The recurrence is algebraically the expanded sum
/// of products and never forms a product of many factors, so it cannot
/// underflow.
std::vector<GrowthIterate> iterate_growth(std::span<const double> eta, std::span<const double> Lambda, double J0);
std::vector<GrowthIterate> iterate_growth(const GrowthSchedule& schedule, std::span<const double> Lambda,
                                          double J0);

/// limsup bound Lambda_inf / (1 - eta); +inf when eta >= 1.
double geometric_tail(double eta, double Lambda_inf);

struct BoundedDriftEnvelope {
  double r0;
  double R;
  double beta_star;
  double T_star;
  double eta_star;
  double bound;  // +inf when the prefactor overflows
};

/// (2 - eta)/(1 - eta) (boundary + forcing), exactly 0 when both are 0.
double bounded_drift_bound(double eta_star, double boundary_limsup, double forcing_window_limsup);

BoundedDriftEnvelope bounded_drift_envelope(double c0, double M1, double M2, const Domain& domain, const Point& x0,
                                            double boundary_limsup, double forcing_window_limsup);

struct ScheduleOptions {
  double t_star = 0.0;      // T0 must exceed max(1/3, t_star)
  double horizon = 1e6;     // last sampled time of the T0 search
  int per_decade = 512;     // geometric grid density
};

/// Z(t) for a drift growth value z = z0(t) > d.
double drift_exponent(double c0, double M1, double d, double z);

/// T0 and the growth schedule for a time-growing drift bound z0. Throws
/// NotIncreasing, NoValidT0, or BadParameter for eps0 <= 0 or K < 1.
GrowthSchedule unbounded_drift_schedule(double c0, double M1, const Domain& domain, const TimeFunction& z0,
                                        double eps0, int K, const ScheduleOptions& options = {});

struct UnboundedDriftEnvelope {
  double ell;
  double bound;
  double window_begin;
  double window_end;
};

/// e^{d^2/(2 c0)} ell.
double unbounded_drift_bound(double ell, double c0, double d);

/// ell estimated as the sup of Lambda_bar(t) e^{(d/c0) z0(t)} over
/// geometrically spaced samples of [window_begin, window_end].
UnboundedDriftEnvelope unbounded_drift_envelope(const TimeFunction& Lambda_bar, const TimeFunction& z0, double c0,
                                                double d, double window_begin, double window_end,
                                                int samples = 2049);

struct ConditionOptions {
  double t_begin = 16.0;      // lower integration limit, past e^e so ln ln t >= 1
  double horizon = 1e300;     // divergence is tested in ln t, so this is cheap
  double threshold = 10.0;    // partial integral that counts as "diverging"
  double epsilon = 1e-2;      // epsilon in the monotonicity weight
  int window_samples = 256;
};

struct ConditionReport {
  double partial_integral = 0.0;  // int_{t_begin}^{horizon} e^{-(d/c0) z0}
  bool diverges = false;
  double t_star = 0.0;  // start of the first window with single-signed differences
  double window_end = 0.0;
  int monotone_sign = 0;  // +1 increasing, -1 decreasing, 0 none found
  [[nodiscard]] bool pass() const noexcept { return diverges && monotone_sign != 0; }
};

/// Divergence of int e^{-(d/c0) z0} and monotonicity of
///   calF(t) = Lambda_bar(t) exp(e^{-d^2/(2c0) - eps} int_{t*}^{t+1} e^{-(d/c0) z0}).
/// The monotonicity window [t*, 10 t*] slides over t* = t_begin 10^j until
/// every sampled difference of ln calF has one sign.
ConditionReport condition_report(const TimeFunction& z0, const TimeFunction& Lambda_bar, double c0, double d,
                                 const ConditionOptions& options = {});

enum class FamilyKind { Ex1i, Ex1ii, Ex1iii, Ex2 };

std::string_view to_string(FamilyKind kind) noexcept;

struct FamilyParams {
  FamilyKind kind = FamilyKind::Ex1iii;
  double gamma = 1.0;  // Ex1i, Ex1ii, Ex2
  double alpha = 0.0;  // Ex1ii, Ex1iii, Ex2
  double beta = 1.0;   // Ex2
  double L = 1.0;
  double delta = 0.0;  // Ex1 cases
  double c0 = 1.0;
  double d = 1.0;
};

struct FamilyResult {
  Expr z0;
  Expr Lambda_bar;
  double ell = 0.0;
  ConditionReport report;
};

/// Closed-form drift growth and data decay profiles with their exact limit
/// ell. Throws BadParameter when the family constraints fail.
FamilyResult example_family(const FamilyParams& params, const ConditionOptions& options = {});

}  // namespace driftbound
