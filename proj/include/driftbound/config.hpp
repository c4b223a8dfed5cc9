#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "driftbound/bounds.hpp"
#include "driftbound/certify.hpp"
#include "driftbound/solver.hpp"

namespace driftbound {

/// Config problem at a JSON pointer inside the document ("" for the root).
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : Error(ErrorCode::ConfigError, (pointer.empty() ? "/" : pointer) + ": " + message),
        pointer_(std::move(pointer)) {}

  [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

enum class CertifyMode { MaxPrinciple, Bounded, Unbounded, NHL1, NHL2, NHL3, NHL4 };

std::string_view to_string(CertifyMode mode) noexcept;

struct RunConfig {
  Scenario scenario;
  CertifyMode mode = CertifyMode::MaxPrinciple;
  CertifyOptions certify;
  SimulateOptions simulate;
  double slack = 2e-3;
  std::vector<FamilyParams> families;
  ConditionOptions family_conditions;
};

/// Parses and validates a scenario config. Unknown keys are errors so typos
/// do not silently fall back to defaults. Throws ConfigError.
RunConfig load_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

/// Dispatch on cfg.mode.
BoundCertificate run_certify(const RunConfig& cfg);

/// Non-finite numbers are written as null.
nlohmann::json to_json(const BoundCertificate& cert);
nlohmann::json to_json(const DominationReport& report);
nlohmann::json to_json(const FamilyParams& params, const FamilyResult& result);

}  // namespace driftbound
