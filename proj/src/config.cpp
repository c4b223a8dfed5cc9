#include "driftbound/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace driftbound {

using nlohmann::json;

std::string_view to_string(CertifyMode mode) noexcept {
  switch (mode) {
    case CertifyMode::MaxPrinciple: return "max_principle";
    case CertifyMode::Bounded: return "bounded";
    case CertifyMode::Unbounded: return "unbounded";
    case CertifyMode::NHL1: return "nonlinear-NHL1";
    case CertifyMode::NHL2: return "nonlinear-NHL2";
    case CertifyMode::NHL3: return "nonlinear-NHL3";
    case CertifyMode::NHL4: return "nonlinear-NHL4";
  }
  return "?";
}

namespace {

/// View of one JSON object that remembers its pointer and which keys were
/// read, so leftovers can be reported.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg, const std::string& key = "") const {
    throw ConfigError(key.empty() ? ptr_ : ptr_ + "/" + key, msg);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) fail("missing required key", key);
    return j_.at(key);
  }

  Node child(const std::string& key) { return {raw(key), ptr_ + "/" + key}; }
  std::string path(const std::string& key) const { return ptr_ + "/" + key; }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail("expected a number", key);
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
  std::optional<double> maybe_number(const std::string& key) {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail("expected an integer", key);
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail("expected true or false", key);
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail("expected a string", key);
    return v.get<std::string>();
  }
  std::string string(const std::string& key, std::string fallback) { return has(key) ? string(key) : fallback; }

  std::optional<Expr> maybe_expr(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return parse_expr(j_.at(key), path(key));
  }
  Expr expr(const std::string& key, const Expr& fallback) { return maybe_expr(key).value_or(fallback); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail("unknown key", it.key());
    }
  }

  static Expr parse_expr(const json& v, const std::string& ptr) {
    if (v.is_number()) return Expr::constant(v.get<double>());
    if (!v.is_string()) throw ConfigError(ptr, "expected an expression string or a number");
    try {
      return Expr::parse(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ConfigError(ptr, e.what());
    }
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

Eigen::VectorXd vec(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.empty()) throw ConfigError(ptr, "expected a non-empty array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(ptr + "/" + std::to_string(i), "expected a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Domain read_domain(Node n) {
  const std::string kind = n.string("kind");
  Domain d = Domain::interval(0.0, 1.0);
  if (kind == "interval") {
    d = Domain::interval(n.number("lower"), n.number("upper"));
  } else if (kind == "box") {
    d = Domain::box(vec(n.raw("lower"), n.path("lower")), vec(n.raw("upper"), n.path("upper")));
  } else if (kind == "ball") {
    d = Domain::ball(vec(n.raw("center"), n.path("center")), n.number("radius"));
  } else {
    n.fail("expected interval, box or ball", "kind");
  }
  n.finish();
  return d;
}

std::vector<std::vector<Expr>> expr_rows(const json& v, const std::string& ptr, int n) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    throw ConfigError(ptr, "expected " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<Expr>> rows;
  for (int i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rp = ptr + "/" + std::to_string(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ConfigError(rp, "expected " + std::to_string(n) + " entries");
    }
    rows.emplace_back();
    for (int j = 0; j < n; ++j) {
      rows.back().push_back(Node::parse_expr(row[static_cast<std::size_t>(j)], rp + "/" + std::to_string(j)));
    }
  }
  return rows;
}

void read_coefficients(Node n, Scenario& sc) {
  const int dim = sc.dimension();
  sc.A = SymmetricExprMatrix::identity(dim);
  sc.K = ExprMatrix::zero(dim);
  sc.drift.assign(static_cast<std::size_t>(dim), Expr());
  if (n.has("A")) {
    const auto rows = expr_rows(n.raw("A"), n.path("A"), dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        const auto& a = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const auto& b = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        if (a.to_string() != b.to_string()) {
          n.fail("A must be symmetric", "A/" + std::to_string(j) + "/" + std::to_string(i));
        }
        sc.A(i, j) = a;
      }
    }
  }
  if (n.has("K")) {
    const auto rows = expr_rows(n.raw("K"), n.path("K"), dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) sc.K(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (n.has("drift")) {
    const json& v = n.raw("drift");
    if (!v.is_array() || static_cast<int>(v.size()) != dim) n.fail("expected " + std::to_string(dim) + " entries", "drift");
    for (int i = 0; i < dim; ++i) {
      sc.drift[static_cast<std::size_t>(i)] =
          Node::parse_expr(v[static_cast<std::size_t>(i)], n.path("drift") + "/" + std::to_string(i));
    }
  }
  n.finish();
}

void read_p_family(Node n, Scenario& sc) {
  const std::string tag = n.string("tag");
  if (tag == "log") {
    sc.p_family = PFamily::log();
  } else if (tag == "power") {
    const double g = n.number("gamma");
    if (!(g >= 1.0)) n.fail("power family needs gamma >= 1", "gamma");
    sc.p_family = PFamily::power(g);
  } else if (tag == "identity") {
    sc.p_family = PFamily::identity(n.boolean("whole_line", true));
  } else {
    n.fail("expected log, power or identity", "tag");
  }
  // kappa: K in the config is the permeability-type matrix, divided by the
  // compressibility as in the slightly compressible equation of state.
  if (n.has("kappa")) {
    const double kappa = n.number("kappa");
    if (!(kappa > 0.0)) n.fail("kappa must be positive", "kappa");
    sc.K = sc.K.scaled(1.0 / kappa);
  }
  n.finish();
}

Constants read_constants(Node n) {
  Constants k;
  k.c0 = n.number("c0", k.c0);
  k.M1 = n.number("M1", k.M1);
  k.M2 = n.maybe_number("M2");
  k.z0 = n.maybe_expr("z0");
  k.c1 = n.number("c1", k.c1);
  k.c2 = n.number("c2", k.c2);
  k.cB = n.number("cB", k.cB);
  k.gamma0 = n.number("gamma0", k.gamma0);
  k.b_bar = n.maybe_expr("b_bar");
  n.finish();
  return k;
}

CertifyMode read_mode(Node& n) {
  const std::string m = n.string("mode", "max_principle");
  for (auto mode : {CertifyMode::MaxPrinciple, CertifyMode::Bounded, CertifyMode::Unbounded, CertifyMode::NHL1,
                    CertifyMode::NHL2, CertifyMode::NHL3, CertifyMode::NHL4}) {
    if (m == to_string(mode)) return mode;
  }
  n.fail("expected max_principle, bounded, unbounded or nonlinear-NHL1..NHL4", "mode");
}

void read_certify(Node n, RunConfig& cfg) {
  cfg.mode = read_mode(n);
  CertifyOptions& o = cfg.certify;
  o.t_end = n.number("t_end", o.t_end);
  o.envelope_dt = n.number("envelope_dt", o.envelope_dt);
  o.tail_fraction = n.number("tail_fraction", o.tail_fraction);
  o.radius_factor = n.number("radius_factor", o.radius_factor);
  o.times_per_unit = n.integer("times_per_unit", o.times_per_unit);
  o.F = n.maybe_expr("F");
  o.Lambda_bar = n.maybe_expr("Lambda_bar");
  o.Lambda_tilde = n.maybe_expr("Lambda_tilde");
  o.calF = n.maybe_expr("calF");
  o.eps0 = n.number("eps0", o.eps0);
  o.schedule.t_star = n.number("t_star", o.schedule.t_star);
  o.schedule.horizon = n.number("horizon", o.schedule.horizon);
  o.schedule.per_decade = n.integer("per_decade", o.schedule.per_decade);
  o.lambda_margin = n.number("lambda_margin", o.lambda_margin);
  o.lambda1 = n.maybe_number("lambda1");
  o.lambda2 = n.maybe_number("lambda2");
  o.glim_tol = n.number("glim_tol", o.glim_tol);
  cfg.slack = n.number("slack", cfg.slack);
  if (!(o.t_end > 0.0)) n.fail("must be positive", "t_end");
  if (!(o.envelope_dt > 0.0)) n.fail("must be positive", "envelope_dt");
  if (!(o.tail_fraction > 0.0 && o.tail_fraction < 1.0)) n.fail("must lie in (0, 1)", "tail_fraction");
  if (!(o.eps0 > 0.0)) n.fail("must be positive", "eps0");
  if (!(cfg.slack >= 0.0)) n.fail("must be non-negative", "slack");
  n.finish();
}

void read_solver(Node n, RunConfig& cfg) {
  SimulateOptions& s = cfg.simulate;
  if (n.has("resolution")) {
    const json& v = n.raw("resolution");
    if (v.is_number_integer()) {
      s.resolution.assign(static_cast<std::size_t>(cfg.scenario.dimension()), v.get<int>());
    } else if (v.is_array() && static_cast<int>(v.size()) == cfg.scenario.dimension()) {
      for (const auto& r : v) {
        if (!r.is_number_integer()) n.fail("expected integers", "resolution");
        s.resolution.push_back(r.get<int>());
      }
    } else {
      n.fail("expected an integer or one integer per axis", "resolution");
    }
  }
  s.t_end = n.number("t_end", s.t_end);
  s.sample_dt = n.number("sample_dt", s.sample_dt);
  s.cfl = n.number("cfl", s.cfl);
  if (!(s.t_end > 0.0)) n.fail("must be positive", "t_end");
  if (!(s.sample_dt > 0.0)) n.fail("must be positive", "sample_dt");
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) n.fail("must lie in (0, 1]", "cfl");
  n.finish();
}

FamilyParams read_family(Node n) {
  FamilyParams p;
  const std::string kind = n.string("kind");
  bool found = false;
  for (auto k : {FamilyKind::Ex1i, FamilyKind::Ex1ii, FamilyKind::Ex1iii, FamilyKind::Ex2}) {
    if (kind == to_string(k)) {
      p.kind = k;
      found = true;
    }
  }
  if (!found) n.fail("expected ex1_i, ex1_ii, ex1_iii or ex2", "kind");
  p.gamma = n.number("gamma", p.gamma);
  p.alpha = n.number("alpha", p.alpha);
  p.beta = n.number("beta", p.beta);
  p.L = n.number("L", p.L);
  p.delta = n.number("delta", p.delta);
  p.c0 = n.number("c0", p.c0);
  p.d = n.number("d", p.d);
  n.finish();
  return p;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

RunConfig load_config(const json& doc) {
  Node root(doc, "");
  RunConfig cfg;
  Scenario& sc = cfg.scenario;
  const bool families_only = !root.has("domain") && root.has("families");

  if (!families_only) {
    sc.domain = read_domain(root.child("domain"));
    if (root.has("dimension")) {
      const json& v = root.raw("dimension");
      if (!v.is_number_integer() || v.get<int>() != sc.dimension()) {
        root.fail("does not match the domain dimension " + std::to_string(sc.dimension()), "dimension");
      }
    }
    const std::string mode = root.string("mode", "linear");
    if (mode == "linear") {
      sc.mode = Mode::Linear;
    } else if (mode == "nonlinear") {
      sc.mode = Mode::Nonlinear;
    } else {
      root.fail("expected linear or nonlinear", "mode");
    }
    if (root.has("coefficients")) {
      read_coefficients(root.child("coefficients"), sc);
    } else {
      read_coefficients(Node(json::object(), "/coefficients"), sc);
    }
    if (root.has("p_family")) {
      read_p_family(root.child("p_family"), sc);
    } else if (sc.mode == Mode::Nonlinear) {
      root.fail("nonlinear scenarios need p_family");
    }
    if (root.has("data")) {
      Node d = root.child("data");
      sc.f = d.expr("f", Expr());
      sc.g = d.expr("g", Expr());
      sc.u0 = d.expr("u0", Expr());
      sc.u_star = d.number("u_star", 0.0);
      d.finish();
    }
    if (root.has("constants")) sc.constants = read_constants(root.child("constants"));
    try {
      sc.validate();
    } catch (const Error& e) {
      throw ConfigError("", e.what());
    }
  }

  if (root.has("certify")) read_certify(root.child("certify"), cfg);
  cfg.simulate.t_end = cfg.certify.t_end;
  cfg.simulate.sample_dt = 0.05;
  if (root.has("solver")) read_solver(root.child("solver"), cfg);
  if (cfg.simulate.resolution.empty() && !families_only) {
    cfg.simulate.resolution.assign(static_cast<std::size_t>(sc.dimension()), 101);
  }

  if (root.has("families")) {
    const json& v = root.raw("families");
    if (!v.is_array()) root.fail("expected an array", "families");
    for (std::size_t i = 0; i < v.size(); ++i) cfg.families.push_back(read_family(Node(v[i], "/families/" + std::to_string(i))));
  }
  root.finish();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return load_config(doc);
}

BoundCertificate run_certify(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  switch (cfg.mode) {
    case CertifyMode::MaxPrinciple: return max_principle_certificate(sc, cfg.certify);
    case CertifyMode::Bounded: return bounded_drift_certificate(sc, cfg.certify);
    case CertifyMode::Unbounded: return unbounded_drift_certificate(sc, cfg.certify);
    case CertifyMode::NHL1: return nonlinear_certificate(sc, NonlinearMode::NHL1, cfg.certify);
    case CertifyMode::NHL2: return nonlinear_certificate(sc, NonlinearMode::NHL2, cfg.certify);
    case CertifyMode::NHL3: return nonlinear_certificate(sc, NonlinearMode::NHL3, cfg.certify);
    case CertifyMode::NHL4: return nonlinear_certificate(sc, NonlinearMode::NHL4, cfg.certify);
  }
  throw Error(ErrorCode::BadParameter, "unknown certify mode");
}

json to_json(const BoundCertificate& cert) {
  json constants = json::object();
  for (const auto& [name, value] : cert.constants) constants[name] = number_or_null(value);
  json steps = json::array();
  for (const auto& s : cert.steps) {
    steps.push_back({{"k", s.k},
                     {"T_k", number_or_null(s.T_k)},
                     {"tau_k", number_or_null(s.tau_k)},
                     {"eta_k", number_or_null(s.eta_k)},
                     {"Lambda_k", number_or_null(s.Lambda_k)},
                     {"J_k", number_or_null(s.J_k)}});
  }
  json envelope = json::array();
  for (const auto& e : cert.envelope) envelope.push_back({{"t", e.t}, {"bound", number_or_null(e.bound)}});
  json checks = json::array();
  for (const auto& c : cert.checks) {
    checks.push_back(
        {{"assumption", c.assumption}, {"quote_key", c.quote_key}, {"margin", number_or_null(c.margin)}, {"pass", c.pass}});
  }
  return {{"kind", std::string(to_string(cert.kind))},
          {"quantity", std::string(to_string(cert.quantity))},
          {"constants", constants},
          {"steps", steps},
          {"envelope", envelope},
          {"checks", checks},
          {"final_bound", number_or_null(cert.final_bound)},
          {"certified_limit", number_or_null(cert.certified_limit)},
          {"tail_window", {cert.tail_begin, cert.tail_end}}};
}

json to_json(const DominationReport& r) {
  return {{"pass", r.pass},
          {"worst_margin", number_or_null(r.worst_margin)},
          {"worst_t", r.worst_t},
          {"checked", r.checked},
          {"pointwise_checked", r.pointwise_checked},
          {"tail_checked", r.tail_checked},
          {"tail_sup", r.tail_sup}};
}

json to_json(const FamilyParams& p, const FamilyResult& r) {
  return {{"kind", std::string(to_string(p.kind))},
          {"gamma", p.gamma},
          {"alpha", p.alpha},
          {"beta", p.beta},
          {"L", p.L},
          {"delta", p.delta},
          {"c0", p.c0},
          {"d", p.d},
          {"z0", r.z0.to_string()},
          {"Lambda_bar", r.Lambda_bar.to_string()},
          {"ell", r.ell},
          {"partial_integral", number_or_null(r.report.partial_integral)},
          {"diverges", r.report.diverges},
          {"t_star", number_or_null(r.report.t_star)},
          {"monotone_sign", r.report.monotone_sign},
          {"pass", r.report.pass()}};
}

}  // namespace driftbound
