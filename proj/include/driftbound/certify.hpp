#pragma once

#include <optional>
#include <vector>

#include "driftbound/bounds.hpp"
#include "driftbound/certificate.hpp"
#include "driftbound/scenario.hpp"

namespace driftbound {

enum class NonlinearMode { NHL1, NHL2, NHL3, NHL4 };

std::string_view to_string(NonlinearMode mode) noexcept;

struct CertifyOptions {
  double t_end = 10.0;          // certificate horizon
  double envelope_dt = 0.05;    // spacing of max-principle envelope samples
  double tail_fraction = 0.8;   // limsups are taken over [tail_fraction t_end, t_end]
  double radius_factor = 2.0;   // barrier radius R = radius_factor * diam(U)
  std::vector<int> points_per_axis;  // data sampling grid, empty: 9 per axis
  int times_per_unit = 16;      // boundary data samples per unit time

  std::optional<Expr> F;  // majorant of |f|; sup over the sample grid when absent

  // unbounded drift
  std::optional<Expr> Lambda_bar;
  double eps0 = 1e-2;
  ScheduleOptions schedule;
  ConditionOptions conditions;

  // nonlinear
  double lambda_margin = 0.1;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<Expr> Lambda_tilde;  // NHL2-4 decay profile of boundary data plus forcing
  std::optional<Expr> calF;          // NHL3/4 increasing majorant of int_0^t F
  double glim_tol = 1e-3;            // tail sup of |g - u*| that counts as converged
};

/// |u| <= max_{Gamma_t} |u| + int_0^t F at envelope_dt spacing.
BoundCertificate max_principle_certificate(const Scenario& sc, const CertifyOptions& opt);

/// Linear scenario with constant drift bound M2: pointwise envelope from the
/// growth iteration on T_k = k T* and the asymptotic bound over the tail.
BoundCertificate bounded_drift_certificate(const Scenario& sc, const CertifyOptions& opt);

/// Linear scenario with drift growth profile z0: max principle up to T0,
/// growth iteration on the unbounded-drift schedule afterwards, and
/// e^{d^2/(2c0)} ell when Lambda_bar is supplied.
BoundCertificate unbounded_drift_certificate(const Scenario& sc, const CertifyOptions& opt);

/// Convergence certificate for max |u - u*| (max u for NHL4). Throws
/// HypothesisFailed when an integrability hypothesis fails outright and
/// RangeViolation when the a-priori range leaves J.
BoundCertificate nonlinear_certificate(const Scenario& sc, NonlinearMode mode, const CertifyOptions& opt);

}  // namespace driftbound
