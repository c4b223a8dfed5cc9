#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "driftbound/config.hpp"

using namespace driftbound;
using nlohmann::json;

namespace {

json heat() {
  return json::parse(R"j({
    "domain": {"kind": "interval", "lower": 0, "upper": 1},
    "dimension": 1,
    "mode": "linear",
    "coefficients": {"A": [["1"]], "drift": ["0.5"], "K": [["0"]]},
    "data": {"f": "0", "g": 0.1, "u0": "sin(pi*x1)"},
    "constants": {"c0": 1, "M1": 1, "M2": 0.5},
    "certify": {"mode": "bounded", "t_end": 4, "envelope_dt": 0.1},
    "solver": {"resolution": 51, "sample_dt": 0.1}
  })j");
}

std::string pointer_of(const json& doc) {
  try {
    (void)load_config(doc);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("linear config round trip") {
  const RunConfig cfg = load_config(heat());
  CHECK(cfg.mode == CertifyMode::Bounded);
  CHECK(cfg.scenario.dimension() == 1);
  CHECK(cfg.scenario.constants.M2.value() == 0.5);
  CHECK(cfg.scenario.g.at_time(3.0) == 0.1);
  CHECK(cfg.certify.envelope_dt == 0.1);
  CHECK(cfg.simulate.resolution == std::vector<int>{51});
  CHECK(cfg.simulate.t_end == 4.0);  // follows certify.t_end unless the solver block sets it

  json doc = heat();
  doc.erase("solver");
  const RunConfig follow = load_config(doc);
  CHECK(follow.simulate.t_end == 4.0);
  CHECK(follow.simulate.resolution == std::vector<int>{101});
}

TEST_CASE("config errors carry a pointer") {
  json doc = heat();
  doc["bogus"] = 1;
  CHECK(pointer_of(doc) == "/bogus");

  doc = heat();
  doc["constants"]["c0"] = "one";
  CHECK(pointer_of(doc) == "/constants/c0");

  doc = heat();
  doc["data"]["u0"] = "sin(pi*x1";
  CHECK(pointer_of(doc) == "/data/u0");

  doc = heat();
  doc["dimension"] = 2;
  CHECK(pointer_of(doc) == "/dimension");

  doc = heat();
  doc["certify"]["mode"] = "nonlinear-NHL5";
  CHECK(pointer_of(doc) == "/certify/mode");

  doc = heat();
  doc["domain"] = json::parse(R"j({"kind": "box", "lower": [0, 0], "upper": [1, 1]})j");
  doc.erase("dimension");
  doc["coefficients"]["A"] = json::parse(R"j([["1", "0.1"], ["0.2", "1"]])j");
  doc["coefficients"].erase("drift");
  doc["coefficients"].erase("K");
  doc.erase("solver");
  CHECK(pointer_of(doc) == "/coefficients/A/1/0");

  doc = heat();
  doc["solver"]["resolution"] = {51, 51};
  CHECK(pointer_of(doc) == "/solver/resolution");
}

TEST_CASE("nonlinear config applies kappa and dispatches") {
  const json doc = json::parse(R"j({
    "domain": {"kind": "interval", "lower": 0, "upper": 1},
    "mode": "nonlinear",
    "coefficients": {"drift": ["-0.5*s"], "K": [["1"]]},
    "p_family": {"tag": "log", "kappa": 5},
    "data": {"f": "exp(-2*t)", "g": "1 + 0.5*exp(-t)", "u0": "1 + 0.5*sin(pi*x1)", "u_star": 1},
    "constants": {"c2": 0.2, "cB": 0.5},
    "certify": {"mode": "nonlinear-NHL1", "t_end": 30, "F": "exp(-2*t)"}
  })j");
  const RunConfig cfg = load_config(doc);
  CHECK(cfg.scenario.p_family.tag() == PTag::Log);
  CHECK(cfg.scenario.K(0, 0).at_time(0.0) == doctest::Approx(0.2));
  const auto cert = run_certify(cfg);
  CHECK(cert.kind == CertKind::Nonlinear);
  CHECK(cert.get("mu2") == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(cert.checks_pass());

  json missing = doc;
  missing.erase("p_family");
  CHECK(pointer_of(missing) == "");
}

TEST_CASE("certificate json") {
  BoundCertificate cert;
  cert.kind = CertKind::Nonlinear;
  cert.set("mu0", 0.5);
  cert.set("huge", BoundCertificate::kInfinity);
  cert.steps.push_back({1, 0.5, 0.5, 0.9375, 0.1, 0.2});
  cert.envelope.push_back({0.0, 1.0});
  cert.add_check("integrable forcing", "fc2", -1.0);
  const json j = to_json(cert);
  CHECK(j["kind"] == "nonlinear");
  CHECK(j["constants"]["mu0"] == 0.5);
  CHECK(j["constants"]["huge"].is_null());
  CHECK(j["final_bound"].is_null());
  CHECK(j["certified_limit"].is_null());
  CHECK(j["steps"][0]["eta_k"] == 0.9375);
  CHECK(j["envelope"][0]["bound"] == 1.0);
  CHECK(j["checks"][0]["quote_key"] == "fc2");
  CHECK(j["checks"][0]["pass"] == false);
}

TEST_CASE("families config and shipped configs load") {
  const RunConfig cfg = load_config(json::parse(R"j({"families": [{"kind": "ex2", "alpha": 1, "beta": 1}]})j"));
  REQUIRE(cfg.families.size() == 1);
  CHECK(cfg.families[0].kind == FamilyKind::Ex2);
  CHECK(pointer_of(json::parse(R"j({"families": [{"kind": "ex3"}]})j")) == "/families/0/kind");

  int loaded = 0;
  for (const auto& entry : std::filesystem::directory_iterator(DRIFTBOUND_CONFIG_DIR)) {
    CHECK_NOTHROW((void)load_config_file(entry.path().string()));
    ++loaded;
  }
  CHECK(loaded >= 5);
}
