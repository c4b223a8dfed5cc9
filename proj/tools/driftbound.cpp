// Batch front end: driftbound {simulate|certify|compare|families} CONFIG
//
// Exit status: 0 when the summary is pass, 1 on a certification failure
// (hypothesis or domination), 2 on config or usage errors. Diagnostics for
// 1 and 2 go to stderr as one JSON object per line.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "driftbound/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace driftbound;

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  long seed = 0;  // reserved, nothing is randomized
  std::optional<double> envelope_dt;
  std::optional<double> slack;
};

struct Failure {
  std::string assumption;
  std::string quote_key;
  std::string message;
};

/// Hypotheses that surface as library errors rather than certificate checks.
std::optional<Failure> as_failure(const Error& e) {
  if (const auto* h = dynamic_cast<const HypothesisFailed*>(&e)) return Failure{h->assumption(), h->quote_key(), e.what()};
  switch (e.code()) {
    case ErrorCode::RadiusTooSmall: return Failure{"barrier radius exceeds diameter", "choicey", e.what()};
    case ErrorCode::InteriorPoint: return Failure{"barrier center outside the closure", "choicey", e.what()};
    case ErrorCode::RangeViolation: return Failure{"a-priori range inside J", "J", e.what()};
    case ErrorCode::NotIncreasing: return Failure{"increasing drift growth", "Ni", e.what()};
    case ErrorCode::NoValidT0: return Failure{"drift start time", "T0choice", e.what()};
    case ErrorCode::NegativeForcingMajorant: return Failure{"forcing majorant", "fc1", e.what()};
    case ErrorCode::Instability:
    case ErrorCode::RangeExit:
    case ErrorCode::OutOfRange: return Failure{"discrete run stays admissible", "solver", e.what()};
    default: return std::nullopt;
  }
}

void diagnostic(const std::string& kind, const std::string& code, const std::string& message,
                const json& extra = json::object()) {
  json d = {{"status", kind}, {"code", code}, {"message", message}};
  d.update(extra);
  std::cerr << d.dump() << '\n';
}

class Run {
 public:
  Run(std::string command, const Flags& flags) : command_(std::move(command)), flags_(flags) {
    fs::create_directories(flags_.out);
  }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(flags_.out) / name;
    std::ofstream os(p);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + p.string());
    outputs_.push_back(p.string());
    return p;
  }

  void fail(const Failure& f) {
    pass_ = false;
    failures_.push_back({{"assumption", f.assumption}, {"quote_key", f.quote_key}, {"message", f.message}});
    diagnostic("fail", f.quote_key, f.message, {{"assumption", f.assumption}});
  }
  void fail_check(const HypothesisCheck& c) {
    pass_ = false;
    failures_.push_back({{"assumption", c.assumption}, {"quote_key", c.quote_key}, {"margin", c.margin}});
    diagnostic("fail", c.quote_key, "check failed with margin " + std::to_string(c.margin), {{"assumption", c.assumption}});
  }
  void fail_domination(const DominationReport& r) {
    pass_ = false;
    failures_.push_back({{"assumption", "envelope domination"}, {"worst_margin", r.worst_margin}, {"worst_t", r.worst_t}});
    diagnostic("fail", "domination", "measured value exceeds the envelope at t=" + std::to_string(r.worst_t));
  }

  void ledger(const std::string& name, double v) { ledger_[name] = std::isfinite(v) ? json(v) : json(nullptr); }

  int finish(const RunConfig& cfg) {
    const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const auto& k = cfg.scenario.constants;
    json scenario_constants = {{"c0", k.c0}, {"M1", k.M1}, {"c1", k.c1}, {"c2", k.c2}, {"cB", k.cB}, {"gamma0", k.gamma0}};
    if (k.M2) scenario_constants["M2"] = *k.M2;
    if (k.z0) scenario_constants["z0"] = k.z0->to_string();
    if (k.b_bar) scenario_constants["b_bar"] = k.b_bar->to_string();
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));

    outputs_.push_back((fs::path(flags_.out) / "manifest.json").string());
    json m = {{"config", flags_.config},
              {"command", command_},
              {"seed", flags_.seed},
              {"constants", {{"declared", scenario_constants}, {"resolved", ledger_}}},
              {"outputs", outputs_},
              {"wall_clock_seconds", wall},
              {"started_at", stamp},
              {"summary", pass_ ? "pass" : "fail"},
              {"failures", failures_}};
    std::ofstream(fs::path(flags_.out) / "manifest.json") << m.dump(2) << '\n';
    std::cout << command_ << ": " << (pass_ ? "pass" : "fail") << " (" << flags_.out << "/manifest.json)\n";
    return pass_ ? 0 : 1;
  }

 private:
  std::string command_;
  Flags flags_;
  bool pass_ = true;
  json ledger_ = json::object();
  json failures_ = json::array();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string csv(const TimeSeries& ts) {
  std::ostringstream os;
  ts.write_csv(os);
  return os.str();
}

/// Certificate or nullopt when a hypothesis failed outright (already recorded).
std::optional<BoundCertificate> certify(const RunConfig& cfg, Run& run) {
  try {
    BoundCertificate cert = run_certify(cfg);
    for (const auto& [name, value] : cert.constants) run.ledger(name, value);
    for (const auto& c : cert.checks) {
      if (!c.pass) run.fail_check(c);
    }
    run.write("certificate.json", to_json(cert).dump(2) + "\n");
    return cert;
  } catch (const Error& e) {
    const auto f = as_failure(e);
    if (!f) throw;
    run.fail(*f);
    json stub = {{"kind", std::string(to_string(cfg.mode))},
                 {"constants", json::object()},
                 {"steps", json::array()},
                 {"envelope", json::array()},
                 {"checks", json::array({{{"assumption", f->assumption},
                                          {"quote_key", f->quote_key},
                                          {"margin", nullptr},
                                          {"pass", false}}})},
                 {"error", f->message}};
    run.write("certificate.json", stub.dump(2) + "\n");
    return std::nullopt;
  }
}

int simulate_cmd(const RunConfig& cfg, Run& run) {
  const auto res = simulate(cfg.scenario, cfg.simulate);
  run.ledger("steps", static_cast<double>(res.steps));
  run.write("timeseries.csv", csv(res.series));
  return run.finish(cfg);
}

int certify_cmd(const RunConfig& cfg, Run& run) {
  (void)certify(cfg, run);
  return run.finish(cfg);
}

int compare_cmd(const RunConfig& cfg, Run& run, double slack) {
  const auto cert = certify(cfg, run);
  if (!cert) return run.finish(cfg);
  const auto res = simulate(cfg.scenario, cfg.simulate);
  run.write("timeseries.csv", csv(res.series));
  const auto rep = check_envelope(res.series, *cert, slack);
  json j = to_json(rep);
  j["slack"] = slack;
  run.write("domination.json", j.dump(2) + "\n");
  if (!rep.pass) run.fail_domination(rep);
  return run.finish(cfg);
}

int families_cmd(const RunConfig& cfg, Run& run) {
  if (cfg.families.empty()) throw ConfigError("/families", "families needs a non-empty list");
  json rows = json::array();
  std::ostringstream table;
  table << "kind,gamma,alpha,beta,L,delta,c0,d,ell,partial_integral,monotone_sign,pass\n";
  char buf[512];
  for (const auto& p : cfg.families) {
    try {
      const auto r = example_family(p, cfg.family_conditions);
      rows.push_back(to_json(p, r));
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                    std::string(to_string(p.kind)).c_str(), p.gamma, p.alpha, p.beta, p.L, p.delta, p.c0, p.d, r.ell,
                    r.report.partial_integral, r.report.monotone_sign, r.report.pass() ? 1 : 0);
      table << buf;
      if (!r.report.pass()) {
        run.fail({"condition report", std::string(to_string(p.kind)), "divergence or monotonicity check failed"});
      }
    } catch (const HypothesisFailed& e) {
      run.fail({e.assumption(), e.quote_key(), e.what()});
      rows.push_back({{"kind", std::string(to_string(p.kind))}, {"pass", false}, {"error", e.what()}});
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,,,,0\n",
                    std::string(to_string(p.kind)).c_str(), p.gamma, p.alpha, p.beta, p.L, p.delta, p.c0, p.d);
      table << buf;
    }
  }
  run.write("families.json", rows.dump(2) + "\n");
  run.write("families.csv", table.str());
  return run.finish(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified sup-norm envelopes for parabolic equations with drift"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--out", flags.out, "output directory")->capture_default_str();
  app.add_option("--seed", flags.seed, "reserved; no randomized paths")->capture_default_str();
  app.add_option("--envelope-dt", flags.envelope_dt, "envelope sample spacing (default: certify.envelope_dt or 0.05)");
  app.add_option("--slack", flags.slack, "domination slack for compare (default: certify.slack or 2e-3)");

  std::string command;
  for (const auto& [name, help] : {std::pair{"simulate", "run the solver and write timeseries.csv"},
                                   std::pair{"certify", "build the certificate and write certificate.json"},
                                   std::pair{"compare", "certify, simulate and check domination"},
                                   std::pair{"families", "condition reports for the example families"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", flags.config, "scenario config (JSON)")->required();
    sub->fallthrough();
    sub->callback([&command, n = std::string(name)] { command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnostic("error", "UsageError", e.what());
    return 2;
  }

  try {
    RunConfig cfg = load_config_file(flags.config);
    if (flags.envelope_dt) {
      if (!(*flags.envelope_dt > 0.0)) throw ConfigError("--envelope-dt", "must be positive");
      cfg.certify.envelope_dt = *flags.envelope_dt;
    }
    if (flags.slack) cfg.slack = *flags.slack;
    if (command != "families" && !cfg.scenario.A.size()) throw ConfigError("/domain", "this command needs a scenario");

    Run run(command, flags);
    try {
      if (command == "simulate") return simulate_cmd(cfg, run);
      if (command == "certify") return certify_cmd(cfg, run);
      if (command == "compare") return compare_cmd(cfg, run, cfg.slack);
      return families_cmd(cfg, run);
    } catch (const Error& e) {
      // Errors escaping a command are config problems unless they name a hypothesis.
      if (const auto f = as_failure(e)) {
        run.fail(*f);
        return run.finish(cfg);
      }
      throw;
    }
  } catch (const ConfigError& e) {
    diagnostic("error", "ConfigError", e.what(), {{"pointer", e.pointer()}});
    return 2;
  } catch (const ParseError& e) {
    diagnostic("error", "ParseError", e.what(), {{"position", e.position()}, {"expected", e.expected()}});
    return 2;
  } catch (const Error& e) {
    diagnostic("error", std::string(to_string(e.code())), e.what());
    return 2;
  } catch (const std::exception& e) {
    diagnostic("error", "IoError", e.what());
    return 2;
  }
}
