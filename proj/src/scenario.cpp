#include "driftbound/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "driftbound/error.hpp"

namespace driftbound {

// ---------------------------------------------------------------- PFamily

PFamily PFamily::log() { return PFamily(PTag::Log, 1.0, false); }

PFamily PFamily::power(double gamma) {
  if (!(gamma >= 1.0)) throw Error(ErrorCode::BadParameter, "power family requires gamma >= 1");
  return PFamily(PTag::Power, gamma, false);
}

PFamily PFamily::identity(bool whole_line) { return PFamily(PTag::Identity, 1.0, whole_line); }

bool PFamily::contains(double s) const noexcept {
  if (!std::isfinite(s)) return false;
  switch (tag_) {
    case PTag::Log: return s > 0.0;
    case PTag::Power: return s >= 0.0;
    case PTag::Identity: return whole_line_ || s >= 0.0;
  }
  return false;
}

double PFamily::lower() const noexcept {
  if (tag_ == PTag::Identity && whole_line_) return -std::numeric_limits<double>::infinity();
  return 0.0;
}

std::string PFamily::range_string() const {
  if (tag_ == PTag::Log) return "(0,inf)";
  if (tag_ == PTag::Identity && whole_line_) return "(-inf,inf)";
  return "[0,inf)";
}

std::string PFamily::name() const {
  switch (tag_) {
    case PTag::Log: return "log";
    case PTag::Power: return "power";
    case PTag::Identity: return "identity";
  }
  return "?";
}

double PFamily::P(double s) const {
  switch (tag_) {
    case PTag::Log: return std::log(s);
    case PTag::Power: return std::pow(s, gamma_);
    case PTag::Identity: return s;
  }
  return 0.0;
}

double PFamily::dP(double s) const {
  switch (tag_) {
    case PTag::Log: return 1.0 / s;
    case PTag::Power: return gamma_ == 1.0 ? 1.0 : gamma_ * std::pow(s, gamma_ - 1.0);
    case PTag::Identity: return 1.0;
  }
  return 0.0;
}

// --------------------------------------------------------------- matrices

SymmetricExprMatrix SymmetricExprMatrix::identity(int n) {
  SymmetricExprMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = Expr::constant(1.0);
  return m;
}

std::size_t SymmetricExprMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw Error(ErrorCode::BadParameter, "matrix index out of range");
  // Row-major upper triangle.
  return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
}

Eigen::MatrixXd SymmetricExprMatrix::eval(const EvalPoint& p) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      out(i, j) = (*this)(i, j).eval(p);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

ExprMatrix ExprMatrix::identity(int n) {
  ExprMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = Expr::constant(1.0);
  return m;
}

Eigen::MatrixXd ExprMatrix::eval(const EvalPoint& p) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j).eval(p);
  }
  return out;
}

ExprMatrix ExprMatrix::scaled(double factor) const {
  ExprMatrix out(n_);
  const Expr k = Expr::constant(factor);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Expr& e = entries_[i];
    // Keep zero entries literally zero so K = 0 stays recognisable.
    if (e.is_constant() && e.eval({}) == 0.0) {
      out.entries_[i] = e;
    } else {
      out.entries_[i] = k * e;
    }
  }
  return out;
}

// --------------------------------------------------------------- scenario

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::BadParameter, msg);
}

void check_axes(const Expr& e, int n, const char* what) {
  require(e.max_axis() < n, std::string(what) + " references a spatial axis beyond the dimension");
}

}  // namespace

void Scenario::validate() const {
  const int n = dimension();
  require(n >= 1 && n <= 3, "dimension must be 1, 2 or 3");
  require(A.size() == n, "A must be n x n");
  require(static_cast<int>(drift.size()) == n, "drift must have n components");
  require(K.size() == n, "K must be n x n");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      check_axes(A(i, j), n, "A");
      check_axes(K(i, j), n, "K");
      require(!A(i, j).depends_on_s() && !K(i, j).depends_on_s(), "A and K may not depend on s");
    }
    check_axes(drift[static_cast<std::size_t>(i)], n, "drift");
    if (mode == Mode::Linear) {
      require(!drift[static_cast<std::size_t>(i)].depends_on_s(), "linear drift b(x,t) may not depend on s");
    }
  }
  for (const Expr* e : {&f, &g, &u0}) {
    check_axes(*e, n, "data");
    require(!e->depends_on_s(), "f, g and u0 may not depend on s");
  }
  require(!u0.depends_on_t(), "u0 may not depend on t");
  require(constants.c0 > 0.0, "c0 must be positive");
  require(constants.M1 > 0.0, "M1 must be positive");
  require(!constants.M2 || *constants.M2 >= 0.0, "M2 must be non-negative");
  require(constants.c1 >= 0.0 && constants.c2 >= 0.0, "c1 and c2 must be non-negative");
  require(constants.cB >= 0.0, "cB must be non-negative");
  require(constants.gamma0 > 0.0, "gamma0 must be positive");
  if (mode == Mode::Nonlinear) {
    require(p_family.contains(u_star) || (p_family.tag() == PTag::Log && u_star == 0.0),
            "u_star must lie in J");
  }
}

Scenario make_heat_scenario(const Domain& domain) {
  Scenario sc;
  sc.domain = domain;
  const int n = sc.dimension();
  sc.A = SymmetricExprMatrix::identity(n);
  sc.drift.assign(static_cast<std::size_t>(n), Expr());
  sc.K = ExprMatrix::zero(n);
  return sc;
}

Eigen::VectorXd eval_drift(const Scenario& sc, const EvalPoint& p) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(sc.drift.size()));
  for (std::size_t i = 0; i < sc.drift.size(); ++i) b(static_cast<Eigen::Index>(i)) = sc.drift[i].eval(p);
  return b;
}

double spatial_operator(const Scenario& sc, std::span<const double> x, double t, double u,
                        const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
  const EvalPoint p{x, t, u};
  double value = -(sc.A.eval(p).cwiseProduct(hess)).sum() + eval_drift(sc, p).dot(grad);
  if (sc.mode == Mode::Nonlinear) value += sc.p_family.dP(u) * (sc.K.eval(p) * grad).dot(grad);
  return value;
}

Scenario preset(const PresetParams& params, const PresetBase& base) {
  Scenario sc;
  sc.domain = base.domain;
  sc.mode = Mode::Nonlinear;
  sc.A = base.A;
  sc.f = base.f;
  sc.g = base.g;
  sc.u0 = base.u0;
  sc.u_star = base.u_star;
  sc.constants = base.constants;
  switch (params.kind) {
    case PresetKind::SlightlyCompressible:
      if (!(params.kappa > 0.0)) throw Error(ErrorCode::BadParameter, "kappa must be positive");
      sc.K = base.K0.scaled(1.0 / params.kappa);
      sc.p_family = PFamily::log();
      break;
    case PresetKind::Isentropic:
      if (!(params.gamma >= 1.0)) throw Error(ErrorCode::BadParameter, "gamma must be at least 1");
      if (!(params.c > 0.0)) throw Error(ErrorCode::BadParameter, "c must be positive");
      sc.K = base.K0.scaled(params.c);
      sc.p_family = PFamily::power(params.gamma);
      break;
    case PresetKind::IdealGas:
      if (!(params.c > 0.0)) throw Error(ErrorCode::BadParameter, "c must be positive");
      sc.K = base.K0.scaled(params.c);
      sc.p_family = PFamily::identity(params.whole_line);
      break;
  }
  sc.drift.clear();
  for (const Expr& b0 : base.B0) sc.drift.push_back(-(Expr::s() * b0));
  return sc;
}

// ------------------------------------------------------------ verification

bool CoefficientReport::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const MarginEntry& e) { return e.pass; });
}

const MarginEntry* CoefficientReport::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.assumption == name) return &e;
  }
  return nullptr;
}

std::vector<Eigen::VectorXd> probe_directions(int n) {
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = sign;
      dirs.push_back(e);
    }
  }
  // mt19937_64 output is fixed by the standard; the distributions are not,
  // so the Gaussian draw is done by hand.
  std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  auto uniform = [&gen] { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; };
  while (static_cast<int>(dirs.size()) < 2 * n + 16) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      v(i) = std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * std::numbers::pi * uniform());
    }
    const double norm = v.norm();
    if (norm > 1e-8) dirs.push_back(v / norm);
  }
  return dirs;
}

std::vector<Eigen::VectorXd> sample_points(const Domain& domain, const std::vector<int>& per_axis) {
  const auto n = static_cast<int>(domain.dimension());
  std::vector<int> counts = per_axis;
  if (counts.empty()) counts.assign(static_cast<std::size_t>(n), 5);
  if (static_cast<int>(counts.size()) != n) throw Error(ErrorCode::BadParameter, "sample counts per axis must match the dimension");
  Eigen::VectorXd lo, hi;
  if (domain.kind() == DomainKind::Ball) {
    lo = domain.center().array() - domain.radius();
    hi = domain.center().array() + domain.radius();
  } else {
    lo = domain.lower();
    hi = domain.upper();
  }
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      const int c = std::max(counts[static_cast<std::size_t>(i)], 1);
      const double frac = c == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(i)]) / (c - 1);
      x(i) = lo(i) + frac * (hi(i) - lo(i));
    }
    if (domain.kind() != DomainKind::Ball || (x - domain.center()).norm() <= domain.radius() * (1 + 1e-14)) {
      pts.push_back(x);
    }
    int axis = 0;
    while (axis < n && ++idx[static_cast<std::size_t>(axis)] >= std::max(counts[static_cast<std::size_t>(axis)], 1)) {
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == n) break;
  }
  if (domain.kind() == DomainKind::Ball) pts.push_back(domain.center());
  return pts;
}

namespace {

std::vector<double> default_s_values(const Scenario& sc) {
  std::vector<double> s;
  const PFamily& p = sc.p_family;
  if (p.tag() == PTag::Log) {
    s = {0.1, 0.5, 1.0, 2.0, 5.0};
  } else if (p.tag() == PTag::Identity && p.whole_line()) {
    s = {-5.0, -1.0, 0.0, 1.0, 5.0};
  } else {
    s = {0.0, 0.5, 1.0, 2.0, 5.0};
  }
  if (p.contains(sc.u_star)) s.push_back(sc.u_star);
  return s;
}

struct Tracker {
  MarginEntry entry;
  bool seen = false;
  void update(double margin, double t, const Eigen::VectorXd& x) {
    if (!seen || margin < entry.margin) {
      entry.margin = margin;
      entry.worst_t = t;
      entry.worst_x.assign(x.data(), x.data() + x.size());
      seen = true;
    }
  }
};

Tracker tracker(std::string assumption, std::string key) {
  Tracker t;
  t.entry.assumption = std::move(assumption);
  t.entry.quote_key = std::move(key);
  return t;
}

}  // namespace

CoefficientReport verify_coefficient_bounds(const Scenario& sc, const SampleSpec& spec) {
  const int n = sc.dimension();
  const Constants& k = sc.constants;
  const auto points = sample_points(sc.domain, spec.points_per_axis);
  const auto dirs = probe_directions(n);
  const bool nonlinear = sc.mode == Mode::Nonlinear;
  const std::vector<double> s_values = spec.s_values.empty() ? default_s_values(sc) : spec.s_values;

  std::vector<double> times;
  const int nt = std::max(spec.time_samples, 1);
  for (int i = 0; i < nt; ++i) {
    times.push_back(nt == 1 ? spec.t_begin : spec.t_begin + (spec.t_end - spec.t_begin) * i / (nt - 1));
  }

  Tracker ellip = tracker("uniform ellipticity", "firstA");
  Tracker trace = tracker("trace bound", "firstA");
  Tracker drift_const = tracker("bounded drift", "condB");
  Tracker drift_growth = tracker("drift growth profile", "bz");
  Tracker k_lower = tracker("K lower bound", "condall");
  Tracker k_upper = tracker("K upper bound", "condall");
  Tracker b_const = tracker("B growth bound", "B0");
  Tracker b_time = tracker("B time-dependent growth bound", "B3");

  for (double t : times) {
    for (const auto& x : points) {
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
      const EvalPoint p{xs, t, 0.0};
      const Eigen::MatrixXd A = sc.A.eval(p);
      for (const auto& xi : dirs) ellip.update(xi.dot(A * xi) - k.c0, t, x);
      trace.update(k.M1 - A.trace(), t, x);
      if (!nonlinear) {
        const double b = eval_drift(sc, p).norm();
        if (k.M2) drift_const.update(*k.M2 - b, t, x);
        if (k.z0) drift_growth.update(k.z0->at_time(t) - b, t, x);
        continue;
      }
      const Eigen::MatrixXd K = sc.K.eval(p);
      for (const auto& xi : dirs) {
        const double q = xi.dot(K * xi);
        k_lower.update(q + k.c1, t, x);
        k_upper.update(k.c2 - q, t, x);
      }
      for (double s : s_values) {
        const double B = eval_drift(sc, EvalPoint{xs, t, s}).norm();
        const double growth = std::pow(1.0 + std::fabs(s), k.gamma0);
        if (k.cB > 0.0) b_const.update(k.cB * growth - B, t, x);
        if (k.b_bar) b_time.update(k.b_bar->at_time(t) * growth - B, t, x);
      }
    }
  }

  CoefficientReport report;
  for (Tracker* tr : {&ellip, &trace, &drift_const, &drift_growth, &k_lower, &k_upper, &b_const, &b_time}) {
    if (!tr->seen) continue;
    tr->entry.pass = tr->entry.margin >= -1e-12;
    report.entries.push_back(tr->entry);
  }
  return report;
}

}  // namespace driftbound
