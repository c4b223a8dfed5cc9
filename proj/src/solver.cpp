#include "driftbound/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "driftbound/error.hpp"

namespace driftbound {

// ------------------------------------------------------------------- grid

Grid::Grid(const Domain& domain, std::vector<int> counts) : n_(static_cast<int>(domain.dimension())), counts_(std::move(counts)) {
  if (domain.kind() == DomainKind::Ball) {
    throw Error(ErrorCode::UnsupportedDomain, "the solver supports interval and box domains only");
  }
  if (static_cast<int>(counts_.size()) != n_) {
    throw Error(ErrorCode::BadParameter, "resolution must list one node count per axis");
  }
  for (int c : counts_) {
    if (c < 3) throw Error(ErrorCode::BadParameter, "resolution must be at least 3 nodes per axis");
  }
  for (int a = 0; a < n_; ++a) {
    strides_.push_back(size_);
    size_ *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)]);
    h_.push_back((domain.upper()(a) - domain.lower()(a)) / (counts_[static_cast<std::size_t>(a)] - 1));
  }
  coords_.resize(size_ * static_cast<std::size_t>(n_));
  boundary_.assign(size_, 0);
  for (std::size_t node = 0; node < size_; ++node) {
    std::size_t rem = node;
    bool on_face = false;
    for (int a = 0; a < n_; ++a) {
      const auto c = static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)]);
      const std::size_t i = rem % c;
      rem /= c;
      // Hit the upper face exactly rather than through accumulated spacing.
      coords_[node * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a)] =
          i + 1 == c ? domain.upper()(a) : domain.lower()(a) + static_cast<double>(i) * h_[static_cast<std::size_t>(a)];
      if (i == 0 || i + 1 == c) on_face = true;
    }
    boundary_[node] = on_face ? 1 : 0;
    (on_face ? boundary_nodes_ : interior_).push_back(node);
  }
}

void GridState::refresh_stats() {
  GridStats s;
  s.max_u = u.maxCoeff();
  s.min_u = u.minCoeff();
  s.max_abs_u = u.cwiseAbs().maxCoeff();
  s.max_dev_ustar = (u.array() - u_star).abs().maxCoeff();
  double bmax = 0.0;
  for (std::size_t node : grid->boundary()) bmax = std::max(bmax, std::fabs(u(static_cast<Eigen::Index>(node)) - u_star));
  s.boundary_max = bmax;
  stats = s;
}

GridState build_grid(const Domain& domain, const std::vector<int>& resolution, const Expr& u0, const Expr& g,
                     double u_star) {
  auto grid = std::make_shared<const Grid>(domain, resolution);
  GridState st;
  st.grid = grid;
  st.u_star = u_star;
  st.u.resize(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t node : grid->interior()) {
    st.u(static_cast<Eigen::Index>(node)) = u0.eval(EvalPoint{grid->x(node), 0.0, 0.0});
  }
  double mismatch = 0.0;
  for (std::size_t node : grid->boundary()) {
    const double gv = g.eval(EvalPoint{grid->x(node), 0.0, 0.0});
    st.u(static_cast<Eigen::Index>(node)) = gv;
    try {
      mismatch = std::max(mismatch, std::fabs(u0.eval(EvalPoint{grid->x(node), 0.0, 0.0}) - gv));
    } catch (const Error&) {
      // u0 need not be defined on the boundary.
    }
  }
  st.compat_mismatch = mismatch;
  st.refresh_stats();
  return st;
}

// ---------------------------------------------------------------- stepper

namespace {

/// Coefficient expression tabulated according to what it depends on. Every
/// kind except General is materialised per node so kernels read plain arrays.
class NodeField {
 public:
  enum class Kind { Constant, Spatial, TimeOnly, General };

  NodeField() = default;
  NodeField(const Expr& e, const Grid& grid, const std::vector<std::size_t>& nodes) : expr_(e) {
    if (e.is_constant()) {
      kind_ = Kind::Constant;
      value_ = e.eval({});
      table_.assign(grid.size(), value_);
    } else if (!e.depends_on_t() && !e.depends_on_s()) {
      kind_ = Kind::Spatial;
      table_.assign(grid.size(), 0.0);
      for (std::size_t node : nodes) table_[node] = e.eval(EvalPoint{grid.x(node), 0.0, 0.0});
    } else if (!e.depends_on_x() && !e.depends_on_s()) {
      kind_ = Kind::TimeOnly;
      table_.assign(grid.size(), 0.0);
    } else {
      kind_ = Kind::General;
    }
  }

  void refresh(double t) {
    if (kind_ == Kind::TimeOnly && t != cached_t_) {
      value_ = expr_.at_time(t);
      std::fill(table_.begin(), table_.end(), value_);
      cached_t_ = t;
    }
  }

  [[nodiscard]] double operator()(std::size_t node, std::span<const double> x, double t, double s) const {
    if (kind_ == Kind::General) return expr_.eval(EvalPoint{x, t, s});
    return table_[node];
  }

  /// Per-node values, or nullptr for General fields.
  [[nodiscard]] const double* dense() const noexcept { return kind_ == Kind::General ? nullptr : table_.data(); }
  [[nodiscard]] bool zero() const noexcept { return kind_ == Kind::Constant && value_ == 0.0; }
  [[nodiscard]] bool frozen() const noexcept { return kind_ == Kind::Constant || kind_ == Kind::Spatial; }

 private:
  Expr expr_;
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  double cached_t_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> table_;
};

}  // namespace

struct Stepper::Impl {
  Scenario sc;
  std::shared_ptr<const Grid> grid;
  int n = 0;
  std::vector<NodeField> A;      // upper triangle, row-major
  std::vector<NodeField> drift;  // n
  std::vector<NodeField> K;      // n * n
  NodeField f;
  NodeField g;
  bool nonlinear = false;
  bool has_drift = false;
  bool has_K = false;
  bool has_mixed = false;
  bool frozen_limit = false;  // stability limit independent of t and u
  double cached_limit = -1.0;
  double scale = 1.0;
  bool monotone = true;
  std::vector<double> rhs;
  std::vector<double> inv_h;
  std::vector<double> inv_h2;
  std::vector<std::size_t> stride;

  [[nodiscard]] std::size_t tri(int i, int j) const {
    return static_cast<std::size_t>(i * n - i * (i - 1) / 2 + (j - i));
  }

  void refresh(double t) {
    for (auto& a : A) a.refresh(t);
    for (auto& b : drift) b.refresh(t);
    for (auto& k : K) k.refresh(t);
    f.refresh(t);
    g.refresh(t);
  }

  /// Drift actually applied at a node: b, or B(x,t,u) + P'(u) K grad_c u.
  void total_drift(const double* u, std::size_t i, std::span<const double> x, double t, double* v) const {
    const double ui = u[i];
    for (int a = 0; a < n; ++a) v[a] = has_drift ? drift[static_cast<std::size_t>(a)](i, x, t, ui) : 0.0;
    if (nonlinear && has_K) {
      double grad[3];
      for (int a = 0; a < n; ++a) {
        grad[a] = (u[i + stride[static_cast<std::size_t>(a)]] - u[i - stride[static_cast<std::size_t>(a)]]) * 0.5 *
                  inv_h[static_cast<std::size_t>(a)];
      }
      const double dp = sc.p_family.dP(ui);
      for (int a = 0; a < n; ++a) {
        double kg = 0.0;
        for (int b = 0; b < n; ++b) kg += K[static_cast<std::size_t>(a * n + b)](i, x, t, ui) * grad[b];
        v[a] += dp * kg;
      }
    }
  }

  /// <A, D2u> at a node; also accumulates the diffusion part of the
  /// stability sum into `limit`.
  double diffusion(const double* u, std::size_t i, std::span<const double> x, double t, double& limit) {
    double out = 0.0;
    const double ui = u[i];
    for (int a = 0; a < n; ++a) {
      const auto sa = stride[static_cast<std::size_t>(a)];
      const double aa = A[tri(a, a)](i, x, t, ui);
      out += aa * (u[i + sa] - 2.0 * ui + u[i - sa]) * inv_h2[static_cast<std::size_t>(a)];
      limit += 2.0 * std::fabs(aa) * inv_h2[static_cast<std::size_t>(a)];
      if (!has_mixed) continue;
      double cross = 0.0;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        const double ab = A[tri(std::min(a, b), std::max(a, b))](i, x, t, ui);
        const double w = std::fabs(ab) * inv_h[static_cast<std::size_t>(a)] * inv_h[static_cast<std::size_t>(b)];
        limit += w;
        cross += 0.5 * w;
        if (b > a) {
          const auto sb = stride[static_cast<std::size_t>(b)];
          out += 2.0 * ab * (u[i + sa + sb] - u[i + sa - sb] - u[i - sa + sb] + u[i - sa - sb]) * 0.25 *
                 inv_h[static_cast<std::size_t>(a)] * inv_h[static_cast<std::size_t>(b)];
        }
      }
      // Positive-type stencil needs a_ii/h_i^2 to dominate the cross weights.
      if (aa * inv_h2[static_cast<std::size_t>(a)] < cross) monotone = false;
    }
    return out;
  }

  double upwind(const double* u, std::size_t i, const double* v, double& limit) const {
    double out = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto sa = stride[static_cast<std::size_t>(a)];
      const double va = v[a];
      if (va > 0.0) {
        out += va * (u[i] - u[i - sa]) * inv_h[static_cast<std::size_t>(a)];
      } else if (va < 0.0) {
        out += va * (u[i + sa] - u[i]) * inv_h[static_cast<std::size_t>(a)];
      }
      limit += std::fabs(va) * inv_h[static_cast<std::size_t>(a)];
    }
    return out;
  }

  double node_rhs(const GridState& st, std::size_t i, double& limit) {
    const double* u = st.u.data();
    const auto x = grid->x(i);
    double value = diffusion(u, i, x, st.t, limit);
    if (has_drift || (nonlinear && has_K)) {
      double v[3];
      total_drift(u, i, x, st.t, v);
      value -= upwind(u, i, v, limit);
    }
    return value + f(i, x, st.t, u[i]);
  }

  /// Tight loop for tabulated coefficients without mixed terms or the
  /// quadratic gradient drift. Returns the stability limit if requested.
  bool fast_rhs(const GridState& st, bool want_limit, double& limit_out, double dt = 0.0, double* out = nullptr) {
    if (has_mixed || (nonlinear && has_K)) return false;
    const double* ad[3];
    const double* bd[3];
    for (int a = 0; a < n; ++a) {
      ad[a] = A[tri(a, a)].dense();
      bd[a] = drift[static_cast<std::size_t>(a)].dense();
      if (!ad[a] || (has_drift && !bd[a])) return false;
    }
    const double* fd = f.dense();
    if (!fd) return false;
    const double* u = st.u.data();
    double worst = 0.0;
    for (std::size_t i : grid->interior()) {
      double r = fd[i];
      double lim = 0.0;
      for (int a = 0; a < n; ++a) {
        const std::size_t s = stride[static_cast<std::size_t>(a)];
        const double aa = ad[a][i];
        r += aa * (u[i + s] - 2.0 * u[i] + u[i - s]) * inv_h2[static_cast<std::size_t>(a)];
        if (has_drift) {
          const double v = bd[a][i];
          r -= v > 0.0 ? v * (u[i] - u[i - s]) * inv_h[static_cast<std::size_t>(a)]
                       : v * (u[i + s] - u[i]) * inv_h[static_cast<std::size_t>(a)];
          if (want_limit) lim += std::fabs(v) * inv_h[static_cast<std::size_t>(a)];
        }
        if (want_limit) lim += 2.0 * std::fabs(aa) * inv_h2[static_cast<std::size_t>(a)];
      }
      if (out) {
        out[i] = u[i] + dt * r;
      } else {
        rhs[i] = r;
      }
      if (want_limit) worst = std::max(worst, lim);
    }
    limit_out = worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
    return true;
  }

  /// Fills rhs for all interior nodes and returns the stability limit.
  double evaluate(const GridState& st) {
    refresh(st.t);
    double fast_limit = 0.0;
    if (fast_rhs(st, true, fast_limit)) return fast_limit;
    double worst = 0.0;
    for (std::size_t i : grid->interior()) {
      double limit = 0.0;
      rhs[i] = node_rhs(st, i, limit);
      worst = std::max(worst, limit);
    }
    return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
  }
};

Stepper::Stepper(const Scenario& scenario, std::shared_ptr<const Grid> grid) : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.sc = scenario;
  m.grid = std::move(grid);
  m.n = m.grid->dimension();
  if (m.n != scenario.dimension()) throw Error(ErrorCode::BadParameter, "grid and scenario dimensions differ");
  const auto& inner = m.grid->interior();
  for (int i = 0; i < m.n; ++i) {
    for (int j = i; j < m.n; ++j) {
      m.A.emplace_back(scenario.A(i, j), *m.grid, inner);
      if (i != j && !m.A.back().zero()) m.has_mixed = true;
    }
  }
  for (int i = 0; i < m.n; ++i) {
    m.drift.emplace_back(scenario.drift[static_cast<std::size_t>(i)], *m.grid, inner);
    if (!m.drift.back().zero()) m.has_drift = true;
  }
  m.nonlinear = scenario.mode == Mode::Nonlinear;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      m.K.emplace_back(scenario.K(i, j), *m.grid, inner);
      if (!m.K.back().zero()) m.has_K = true;
    }
  }
  m.f = NodeField(scenario.f, *m.grid, inner);
  m.g = NodeField(scenario.g, *m.grid, m.grid->boundary());
  m.frozen_limit = !(m.nonlinear && m.has_K) &&
                   std::all_of(m.A.begin(), m.A.end(), [](const NodeField& a) { return a.frozen(); }) &&
                   std::all_of(m.drift.begin(), m.drift.end(), [](const NodeField& b) { return b.frozen(); });
  m.rhs.assign(m.grid->size(), 0.0);
  for (int a = 0; a < m.n; ++a) {
    const double h = m.grid->spacing(a);
    m.inv_h.push_back(1.0 / h);
    m.inv_h2.push_back(1.0 / (h * h));
    m.stride.push_back(m.grid->stride(a));
  }
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

bool Stepper::monotone() const noexcept { return impl_->monotone; }
void Stepper::set_initial_scale(double scale) noexcept { impl_->scale = std::max(scale, 1.0); }

double Stepper::stability_limit(const GridState& state) { return impl_->evaluate(state); }

double Stepper::rhs_at(const GridState& state, std::size_t node) {
  impl_->refresh(state.t);
  double limit = 0.0;
  return impl_->node_rhs(state, node, limit);
}

double Stepper::frozen_operator(const GridState& state, std::span<const double> w, std::size_t node) {
  Impl& m = *impl_;
  m.refresh(state.t);
  const auto x = m.grid->x(node);
  const double ui = state.u(static_cast<Eigen::Index>(node));
  double limit = 0.0;
  // The diffusion coefficients only see u through s, which A never uses.
  double value = -m.diffusion(w.data(), node, x, state.t, limit);
  if (m.has_drift) {
    double v[3];
    for (int a = 0; a < m.n; ++a) v[a] = m.drift[static_cast<std::size_t>(a)](node, x, state.t, ui);
    value += m.upwind(w.data(), node, v, limit);
  }
  return value;
}

GridState Stepper::advance(const GridState& state, double dt, double t_max) {
  Impl& m = *impl_;
  GridState next;
  next.grid = state.grid;
  next.u_star = state.u_star;
  next.compat_mismatch = state.compat_mismatch;
  next.u.resize(state.u.size());
  double* out = next.u.data();

  auto choose_dt = [&](double limit) {
    if (!(dt > 0.0)) dt = 0.9 * limit;
    if (state.t + dt > t_max) dt = t_max - state.t;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw Error(ErrorCode::BadParameter, "no positive finite time step available");
    }
  };

  bool fused = false;
  if (m.frozen_limit && m.cached_limit > 0.0) {
    m.refresh(state.t);
    choose_dt(m.cached_limit);
    double unused = 0.0;
    fused = m.fast_rhs(state, false, unused, dt, out);
    if (!fused) {
      for (std::size_t i : m.grid->interior()) m.rhs[i] = m.node_rhs(state, i, unused);
    }
  } else {
    const double limit = m.evaluate(state);
    if (m.frozen_limit) m.cached_limit = limit;
    choose_dt(limit);
  }
  next.t = state.t + dt;

  const double* u = state.u.data();
  const double cap = 1e6 * m.scale;
  for (std::size_t i : m.grid->interior()) {
    const double v = fused ? out[i] : u[i] + dt * m.rhs[i];
    if (m.nonlinear && !m.sc.p_family.contains(v)) {
      throw Error(ErrorCode::RangeExit, "u left J=" + m.sc.p_family.range_string() + " at t=" +
                                            std::to_string(next.t) + " (value " + std::to_string(v) + ")");
    }
    if (!(std::fabs(v) <= cap)) {
      throw Error(ErrorCode::Instability, "max|u| exceeded 1e6 times the initial scale at t=" + std::to_string(next.t));
    }
    out[i] = v;
  }
  m.g.refresh(next.t);
  for (std::size_t i : m.grid->boundary()) out[i] = m.g(i, m.grid->x(i), next.t, 0.0);
  return next;
}

GridState step(const GridState& state, const Scenario& scenario, double dt) {
  Stepper stepper(scenario, state.grid);
  stepper.set_initial_scale(state.u.cwiseAbs().maxCoeff());
  GridState next = stepper.advance(state, dt);
  next.refresh_stats();
  return next;
}

// --------------------------------------------------------------- simulate

namespace {

TimeSample sample_of(const GridState& st) {
  return {st.t, st.stats.max_u, st.stats.min_u, st.stats.max_abs_u, st.stats.max_dev_ustar, st.stats.boundary_max};
}

}  // namespace

void TimeSeries::write_csv(std::ostream& os) const {
  os << "t,max_u,min_u,max_abs_u,max_dev_ustar,boundary_max\n";
  char buf[256];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.max_u, s.min_u, s.max_abs_u,
                  s.max_dev_ustar, s.boundary_max);
    os << buf;
  }
}

double TimeSeries::value(const TimeSample& s, Quantity q) const {
  switch (q) {
    case Quantity::MaxU: return s.max_u;
    case Quantity::MaxAbsU: return s.max_abs_u;
    case Quantity::MaxDevUstar: return s.max_dev_ustar;
  }
  return s.max_abs_u;
}

SimulationResult simulate(const Scenario& scenario, const SimulateOptions& options) {
  if (!(options.t_end >= 0.0) || !(options.sample_dt > 0.0)) {
    throw Error(ErrorCode::BadParameter, "t_end must be non-negative and sample_dt positive");
  }
  std::vector<int> res = options.resolution;
  if (res.empty()) res.assign(static_cast<std::size_t>(scenario.dimension()), 101);
  GridState st = build_grid(scenario.domain, res, scenario.u0, scenario.g, scenario.u_star);
  Stepper stepper(scenario, st.grid);
  stepper.set_initial_scale(st.stats.max_abs_u);

  SimulationResult result;
  if (st.compat_mismatch > 1e-12) {
    result.warnings.push_back("initial/boundary data mismatch " + std::to_string(st.compat_mismatch));
  }
  result.series.samples.push_back(sample_of(st));
  if (options.observer) options.observer(st);

  const auto n_samples = static_cast<long long>(std::floor(options.t_end / options.sample_dt + 1e-9));
  for (long long k = 1; k <= n_samples + 1; ++k) {
    const double target = k <= n_samples ? static_cast<double>(k) * options.sample_dt : options.t_end;
    if (target <= st.t) continue;
    while (st.t < target) {
      double dt = 0.0;
      if (options.cfl != 0.9) dt = options.cfl * stepper.stability_limit(st);
      st = stepper.advance(st, dt, target);
      ++result.steps;
      if (options.observer) {
        st.refresh_stats();
        options.observer(st);
      }
      // Guard against a residual sliver from rounding of the clamp.
      if (target - st.t < 1e-14 * std::max(1.0, target)) st.t = target;
    }
    st.refresh_stats();
    result.series.samples.push_back(sample_of(st));
  }
  if (!stepper.monotone()) {
    result.warnings.push_back("mixed second-order terms exceed diagonal dominance; scheme may not be monotone");
  }
  result.final_state = st;
  return result;
}

DominationReport check_envelope(const TimeSeries& series, const BoundCertificate& cert, double slack) {
  DominationReport rep;
  if (!cert.envelope.empty()) {
    rep.pointwise_checked = true;
    for (const auto& s : series.samples) {
      const double bound = cert.envelope_at(s.t);
      if (!std::isfinite(bound)) continue;
      const double margin = series.value(s, cert.quantity) - bound;
      ++rep.checked;
      if (margin > rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_t = s.t;
      }
      if (margin > slack) rep.pass = false;
    }
  }
  if (cert.asymptotic) {
    rep.tail_checked = true;
    double sup = 0.0;
    double sup_t = 0.0;
    bool any = false;
    for (const auto& s : series.samples) {
      if (s.t < cert.tail_begin || s.t > cert.tail_end) continue;
      const double v = series.value(s, cert.quantity);
      if (!any || v > sup) {
        sup = v;
        sup_t = s.t;
      }
      any = true;
    }
    rep.tail_sup = sup;
    if (any) {
      ++rep.checked;
      const double margin = sup - cert.final_bound;
      if (margin > rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_t = sup_t;
      }
      if (margin > slack) rep.pass = false;
    }
  }
  if (rep.checked == 0) rep.pass = false;  // nothing was compared
  return rep;
}

}  // namespace driftbound
