#include "driftbound/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace driftbound {

std::string_view to_string(CertKind kind) noexcept {
  switch (kind) {
    case CertKind::MaxPrinciple: return "max_principle";
    case CertKind::BoundedDrift: return "bounded_drift";
    case CertKind::UnboundedDrift: return "unbounded_drift";
    case CertKind::Nonlinear: return "nonlinear";
  }
  return "unknown";
}

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::MaxU: return "max_u";
    case Quantity::MaxAbsU: return "max_abs_u";
    case Quantity::MaxDevUstar: return "max_dev_ustar";
  }
  return "unknown";
}

void BoundCertificate::set(std::string name, double value) {
  for (auto& [k, v] : constants) {
    if (k == name) {
      v = value;
      return;
    }
  }
  constants.emplace_back(std::move(name), value);
}

double BoundCertificate::get(std::string_view name) const {
  for (const auto& [k, v] : constants) {
    if (k == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool BoundCertificate::has(std::string_view name) const {
  return std::any_of(constants.begin(), constants.end(), [&](const auto& kv) { return kv.first == name; });
}

void BoundCertificate::add_check(std::string assumption, std::string quote_key, double margin) {
  checks.push_back({std::move(assumption), std::move(quote_key), margin, margin >= 0.0});
}

bool BoundCertificate::checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

const HypothesisCheck* BoundCertificate::check(std::string_view quote_key) const {
  for (const auto& c : checks) {
    if (c.quote_key == quote_key) return &c;
  }
  return nullptr;
}

double BoundCertificate::envelope_at(double t) const {
  if (envelope.empty() || t < envelope.front().t || t > envelope.back().t) return kInfinity;
  auto it = std::lower_bound(envelope.begin(), envelope.end(), t,
                             [](const EnvelopeSample& s, double v) { return s.t < v; });
  if (it->t == t) {
    // Jumps are stored as repeated times; take the larger side.
    double best = it->bound;
    for (auto j = std::next(it); j != envelope.end() && j->t == t; ++j) best = std::max(best, j->bound);
    return best;
  }
  return std::max(it->bound, std::prev(it)->bound);
}

}  // namespace driftbound
