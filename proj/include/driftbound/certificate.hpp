#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace driftbound {

enum class CertKind { MaxPrinciple, BoundedDrift, UnboundedDrift, Nonlinear };

/// Which measured sup-norm statistic a certificate bounds.
enum class Quantity { MaxU, MaxAbsU, MaxDevUstar };

std::string_view to_string(CertKind kind) noexcept;
std::string_view to_string(Quantity q) noexcept;

struct StepRow {
  int k = 0;
  double T_k = 0.0;
  double tau_k = 0.0;
  double eta_k = 0.0;
  double Lambda_k = 0.0;
  double J_k = 0.0;
};

struct EnvelopeSample {
  double t = 0.0;
  double bound = 0.0;
};

struct HypothesisCheck {
  std::string assumption;  // descriptive name of the hypothesis
  std::string quote_key;   // label of the hypothesis in the source text
  double margin = 0.0;     // >= 0 when satisfied
  bool pass = true;
};

struct BoundCertificate {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  CertKind kind = CertKind::MaxPrinciple;
  Quantity quantity = Quantity::MaxAbsU;
  std::vector<std::pair<std::string, double>> constants;  // insertion ordered
  std::vector<StepRow> steps;
  std::vector<EnvelopeSample> envelope;
  std::vector<HypothesisCheck> checks;

  /// Bound on the limsup of the certified quantity; +inf means "no finite
  /// envelope" and is a state, not an overflow.
  double final_bound = kInfinity;
  /// Certified limit of the quantity when the theory gives one (0 for the
  /// decay statements), otherwise unset (NaN).
  double certified_limit = std::numeric_limits<double>::quiet_NaN();
  /// Tail window over which final_bound is compared with measurements.
  double tail_begin = 0.0;
  double tail_end = 0.0;
  bool asymptotic = false;

  void set(std::string name, double value);
  [[nodiscard]] double get(std::string_view name) const;  // NaN if absent
  [[nodiscard]] bool has(std::string_view name) const;

  void add_check(std::string assumption, std::string quote_key, double margin);
  [[nodiscard]] bool checks_pass() const;
  [[nodiscard]] const HypothesisCheck* check(std::string_view quote_key) const;

  [[nodiscard]] bool finite() const noexcept { return final_bound < kInfinity; }

  /// Envelope value at t: the larger of the two bracketing samples (exact at
  /// sample times). +inf outside the sampled range.
  [[nodiscard]] double envelope_at(double t) const;
};

}  // namespace driftbound
