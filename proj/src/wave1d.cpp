#include "rkwave/wave1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "rkwave/errors.hpp"
#include "rkwave/text.hpp"

namespace rkwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBlowUp = 1e30;
constexpr int kImages = 2;

std::string line_prefix(const text::Line& line) {
  return "line " + std::to_string(line.number) + ": ";
}

// Laurent polynomial in z = e^{i theta} with coefficients for powers -w..w.
struct Laurent {
  int w = 0;
  std::vector<double> a{1.0};

  double at(int j) const { return std::abs(j) > w ? 0.0 : a[static_cast<std::size_t>(j + w)]; }
};

Laurent multiply(const Laurent& x, const Laurent& y) {
  Laurent r;
  r.w = x.w + y.w;
  r.a.assign(static_cast<std::size_t>(2 * r.w + 1), 0.0);
  for (int i = -x.w; i <= x.w; ++i) {
    for (int j = -y.w; j <= y.w; ++j) r.a[static_cast<std::size_t>(i + j + r.w)] += x.at(i) * y.at(j);
  }
  return r;
}

Laurent add(const Laurent& x, const Laurent& y, double scale) {
  Laurent r;
  r.w = std::max(x.w, y.w);
  r.a.assign(static_cast<std::size_t>(2 * r.w + 1), 0.0);
  for (int j = -r.w; j <= r.w; ++j) r.a[static_cast<std::size_t>(j + r.w)] = x.at(j) + scale * y.at(j);
  return r;
}

Laurent power(const Laurent& x, int n) {
  Laurent r;
  for (int i = 0; i < n; ++i) r = multiply(r, x);
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double sup_norm(const std::vector<double>& u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

bool finite_and_bounded(const WaveState& s) {
  for (const auto* u : {&s.p, &s.v}) {
    for (double x : *u) {
      if (!(std::abs(x) < kBlowUp)) return false;
    }
  }
  return true;
}

void derivative_into(std::span<const double> u, const Stencil& st, double dx, std::vector<double>& out) {
  const int n = static_cast<int>(u.size());
  const int w = st.halfwidth();
  out.resize(u.size());
  const double inv = 1.0 / dx;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i >= w && i + w < n) {
      for (int j = 1; j <= w; ++j) acc += st.d[static_cast<std::size_t>(j - 1)] * (u[i + j] - u[i - j]);
    } else {
      for (int j = 1; j <= w; ++j) {
        acc += st.d[static_cast<std::size_t>(j - 1)] * (u[(i + j) % n] - u[((i - j) % n + n) % n]);
      }
    }
    out[static_cast<std::size_t>(i)] = acc * inv;
  }
}

// out = -D(other) - k * self
void field_rhs(const std::vector<double>& self, const std::vector<double>& other, const Stencil& st,
               std::span<const double> k, double dx, std::vector<double>& out) {
  derivative_into(other, st, dx, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] - k[i] * self[i];
}

// out = dt * F(in)
void scaled_rhs(const WaveState& in, const Stencil& st, std::span<const double> k, double dx, double dt,
                WaveState& out) {
  field_rhs(in.p, in.v, st, k, dx, out.p);
  field_rhs(in.v, in.p, st, k, dx, out.v);
  for (std::size_t i = 0; i < out.p.size(); ++i) {
    out.p[i] *= dt;
    out.v[i] *= dt;
  }
}

void axpy(double a, const WaveState& x, const WaveState& y, WaveState& out) {
  out.p.resize(y.p.size());
  out.v.resize(y.v.size());
  for (std::size_t i = 0; i < y.p.size(); ++i) {
    out.p[i] = y.p[i] + a * x.p[i];
    out.v[i] = y.v[i] + a * x.v[i];
  }
}

std::vector<double> damping_samples(const WaveProblem& problem) {
  std::vector<double> k(static_cast<std::size_t>(problem.points()));
  for (int i = 0; i < problem.points(); ++i) k[static_cast<std::size_t>(i)] = problem.damping(problem.x(i));
  return k;
}

}  // namespace

// --- stencils and filters ---------------------------------------------------

double Stencil::modified_wavenumber(double theta) const {
  double s = 0.0;
  for (int j = 1; j <= halfwidth(); ++j) s += d[static_cast<std::size_t>(j - 1)] * std::sin(j * theta);
  return 2.0 * s;
}

double FilterSpec::transfer(double theta) const {
  double s = f.empty() ? 0.0 : f[0];
  for (int j = 1; j <= halfwidth(); ++j) s += 2.0 * f[static_cast<std::size_t>(j)] * std::cos(j * theta);
  return s;
}

Stencil maximal_stencil(int halfwidth) {
  if (halfwidth < 1 || halfwidth > 32) throw ValidationError("stencil half-width must be in [1, 32]");
  Stencil st;
  st.name = "central" + std::to_string(2 * halfwidth + 1);
  st.order = 2 * halfwidth;
  st.family = StencilFamily::maximal;
  // d_j = (-1)^{j+1} (w!)^2 / (j (w-j)! (w+j)!)
  double ratio = 1.0;
  for (int j = 1; j <= halfwidth; ++j) {
    ratio *= static_cast<double>(halfwidth - j + 1) / (halfwidth + j);
    st.d.push_back((j % 2 == 1 ? 1.0 : -1.0) * ratio / j);
  }
  return st;
}

FilterSpec standard_filter(int order_zero, int order_pi) {
  if (order_zero < 2 || order_zero % 2 != 0 || order_pi < 2 || order_pi % 2 != 0 || order_zero + order_pi > 64) {
    throw ValidationError("filter orders must be even, at least 2, and sum to at most 64");
  }
  const int n = order_zero / 2;
  const int m = order_pi / 2;
  // u = sin^2(theta/2) = (2 - z - 1/z)/4; D = u^n sum_{k<m} C(n-1+k, k) (1-u)^k.
  // All coefficients are dyadic rationals, so the double arithmetic is exact.
  Laurent u{1, {-0.25, 0.5, -0.25}};
  Laurent one_minus_u{1, {0.25, 0.5, 0.25}};
  Laurent tail{0, {0.0}};
  for (int k = 0; k < m; ++k) tail = add(tail, power(one_minus_u, k), binomial(n - 1 + k, k));
  const Laurent D = multiply(power(u, n), tail);

  FilterSpec f;
  f.name = "F" + std::to_string(order_zero) + (m == 1 ? "" : "_" + std::to_string(order_pi));
  f.order = order_zero;
  for (int j = 0; j <= D.w; ++j) f.f.push_back(D.at(j));
  return f;
}

const Stencil& StencilLibrary::stencil(std::string_view name) const {
  for (const auto& s : stencils) {
    if (s.name == name) return s;
  }
  throw ValidationError("unknown stencil '" + std::string(name) + "'");
}

const FilterSpec& StencilLibrary::filter(std::string_view name) const {
  for (const auto& f : filters) {
    if (f.name == name) return f;
  }
  throw ValidationError("unknown filter '" + std::string(name) + "'");
}

StencilLibrary parse_stencils(std::string_view content) {
  StencilLibrary lib;
  std::set<std::string> names;
  const auto lines = text::tokenize(content);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const std::string& kw = line.tokens[0];
    if (kw != "stencil" && kw != "filter") throw ParseError(line_prefix(line) + "unexpected '" + kw + "'");
    const bool is_stencil = kw == "stencil";
    if (line.tokens.size() < 2) throw ParseError(line_prefix(line) + kw + " needs a name");
    const std::string name = line.tokens[1];
    auto kv = text::key_values(line, 2);
    if (!kv.count("halfwidth")) throw ParseError(line_prefix(line) + kw + " needs halfwidth=<w>");
    if (is_stencil && !kv.count("order")) throw ParseError(line_prefix(line) + "stencil needs order=<q>");
    for (const auto& [key, _] : kv) {
      if (key != "halfwidth" && key != "order") throw ParseError(line_prefix(line) + "unknown key '" + key + "'");
    }
    const long w = text::parse_int(kv["halfwidth"], "half-width");
    const long order = kv.count("order") ? text::parse_int(kv["order"], "order") : 0;
    if (w < (is_stencil ? 1 : 0) || w > 64) throw ParseError(line_prefix(line) + "half-width out of range");
    if (!names.insert(name).second) throw ValidationError(line_prefix(line) + "duplicate name '" + name + "'");

    const char tag = is_stencil ? 'd' : 'f';
    const long first = is_stencil ? 1 : 0;
    std::vector<std::optional<double>> given(static_cast<std::size_t>(w - first + 1));
    bool terminated = false;
    for (++i; i < lines.size(); ++i) {
      const auto& body = lines[i];
      if (body.tokens[0] == "end" && body.tokens.size() == 1) {
        terminated = true;
        break;
      }
      if (body.tokens[0] != std::string(1, tag) || body.tokens.size() != 3) {
        throw ParseError(line_prefix(body) + "expected '" + tag + " <j> <decimal>' or 'end'");
      }
      const long j = text::parse_int(body.tokens[1], "coefficient index");
      if (j < first || j > w) throw ParseError(line_prefix(body) + "coefficient index out of range");
      auto& slot = given[static_cast<std::size_t>(j - first)];
      if (slot) throw ParseError(line_prefix(body) + "coefficient " + std::to_string(j) + " repeated");
      slot = text::parse_double(body.tokens[2], "coefficient");
    }
    if (!terminated) throw ParseError(line_prefix(line) + kw + " '" + name + "' is missing 'end'");

    std::vector<double> values;
    for (std::size_t j = 0; j < given.size(); ++j) {
      if (!given[j]) {
        throw ParseError(line_prefix(line) + "coefficient " + std::to_string(j + first) + " of '" + name +
                         "' missing");
      }
      values.push_back(*given[j]);
    }

    if (is_stencil) {
      double consistency = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) consistency += 2.0 * static_cast<double>(j + 1) * values[j];
      if (std::abs(consistency - 1.0) > 1e-9) {
        throw ValidationError(line_prefix(line) + "stencil '" + name + "' does not approximate d/dx");
      }
      const auto family = name.rfind("drp", 0) == 0 ? StencilFamily::drp : StencilFamily::custom;
      lib.stencils.push_back(Stencil{name, static_cast<int>(order), std::move(values), family});
    } else {
      lib.filters.push_back(FilterSpec{name, static_cast<int>(order), std::move(values), 1.0});
    }
  }
  return lib;
}

StencilLibrary builtin_stencils() {
  StencilLibrary lib;
  for (int w = 1; w <= 10; ++w) lib.stencils.push_back(maximal_stencil(w));
  for (int q = 2; q <= 16; q += 2) lib.filters.push_back(standard_filter(q));
  lib.filters.push_back(standard_filter(16, 4));
  auto bundled = parse_stencils(bundled_stencil_text());
  for (auto& s : bundled.stencils) lib.stencils.push_back(std::move(s));
  for (auto& f : bundled.filters) lib.filters.push_back(std::move(f));
  return lib;
}

// --- problem ------------------------------------------------------------------

void WaveProblem::validate() const {
  if (!(length > 0) || !(final_time > 0) || ppw < 1) {
    throw ValidationError("length, final time and points per wavelength must be positive");
  }
  const double n = length * ppw;
  if (std::abs(n - std::round(n)) > 1e-9 || n < 2 || n > 1e7) {
    throw ValidationError("length * ppw must be an integer number of grid points");
  }
  if (!(packet_width > 0) || !(wavelength > 0)) throw ValidationError("packet width and wavelength must be positive");
  if (damping_power < 1 || damping_power > 32) throw ValidationError("damping power must be in [1, 32]");
  if (!(damping_width > 0) || damping_start < 0 || damping_start + damping_width > length ||
      damping_integral < 0) {
    throw ValidationError("damping region must lie inside the domain with a non-negative integral");
  }
}

int WaveProblem::points() const { return static_cast<int>(std::lround(length * ppw)); }

double WaveProblem::damping(double x) const {
  x -= length * std::floor(x / length);
  const double xi = x - damping_start;
  if (xi < 0 || xi > damping_width) return 0.0;
  const double s = std::sin(kPi * xi / damping_width);
  const int n = damping_power;
  return damping_integral * std::pow(4.0, n) / (binomial(2 * n, n) * damping_width) * std::pow(s * s, n);
}

double WaveProblem::damping_antiderivative(double x) const {
  const double periods = std::floor(x / length);
  const double xr = x - periods * length;
  const double xi = std::clamp(xr - damping_start, 0.0, damping_width);
  // sin^(2n) a = 4^-n [C(2n, n) + 2 sum_k (-1)^k C(2n, n-k) cos(2 k a)]
  const int n = damping_power;
  double sum = binomial(2 * n, n) * xi;
  for (int k = 1; k <= n; ++k) {
    sum += (k % 2 == 1 ? -1.0 : 1.0) * binomial(2 * n, n - k) * damping_width / (k * kPi) *
           std::sin(2.0 * k * kPi * xi / damping_width);
  }
  return periods * damping_integral + damping_integral * sum / (binomial(2 * n, n) * damping_width);
}

double WaveProblem::initial(double x) const {
  double s = 0.0;
  for (int m = -kImages; m <= kImages; ++m) {
    const double y = x + m * length - packet_center;
    const double g = y / packet_width;
    s += std::exp(-std::numbers::ln2 * g * g) * std::cos(2.0 * kPi * y / wavelength);
  }
  return s;
}

WaveState initial_state(const WaveProblem& problem) {
  problem.validate();
  WaveState s;
  s.p.resize(static_cast<std::size_t>(problem.points()));
  for (int i = 0; i < problem.points(); ++i) s.p[static_cast<std::size_t>(i)] = problem.initial(problem.x(i));
  s.v = s.p;
  return s;
}

WaveState analytic_solution(const WaveProblem& problem, double t) {
  problem.validate();
  if (!(t >= 0) || !std::isfinite(t)) throw UnsupportedProblem("analytic solution needs a finite t >= 0");
  WaveState s;
  s.p.resize(static_cast<std::size_t>(problem.points()));
  for (int i = 0; i < problem.points(); ++i) {
    const double x = problem.x(i);
    const double decay = problem.damping_antiderivative(x) - problem.damping_antiderivative(x - t);
    s.p[static_cast<std::size_t>(i)] = problem.initial(x - t) * std::exp(-decay);
  }
  s.v = s.p;
  return s;
}

// --- operators ------------------------------------------------------------------

std::vector<double> spatial_derivative(std::span<const double> u, const Stencil& stencil, double dx) {
  if (u.size() < static_cast<std::size_t>(2 * stencil.halfwidth() + 1)) {
    throw SizeError("array of " + std::to_string(u.size()) + " points is shorter than stencil '" + stencil.name +
                    "'");
  }
  std::vector<double> out;
  derivative_into(u, stencil, dx, out);
  return out;
}

std::vector<double> apply_filter(std::span<const double> u, const FilterSpec& filter) {
  const int n = static_cast<int>(u.size());
  const int w = filter.halfwidth();
  if (n < 2 * w + 1) {
    throw SizeError("array of " + std::to_string(n) + " points is shorter than filter '" + filter.name + "'");
  }
  std::vector<double> out(u.size());
  for (int i = 0; i < n; ++i) {
    double acc = filter.f[0] * u[i];
    for (int j = 1; j <= w; ++j) acc += filter.f[static_cast<std::size_t>(j)] * (u[(i + j) % n] + u[(i - j + n) % n]);
    out[static_cast<std::size_t>(i)] = u[i] - filter.strength * acc;
  }
  return out;
}

WaveState rhs(const WaveState& state, const Stencil& stencil, std::span<const double> k, double dx) {
  if (state.p.size() != state.v.size() || state.p.size() != k.size()) {
    throw SizeError("p, v and k must have the same length");
  }
  if (state.p.size() < static_cast<std::size_t>(2 * stencil.halfwidth() + 1)) {
    throw SizeError("grid is shorter than stencil '" + stencil.name + "'");
  }
  WaveState out;
  field_rhs(state.p, state.v, stencil, k, dx, out.p);
  field_rhs(state.v, state.p, stencil, k, dx, out.v);
  return out;
}

// --- time stepping ------------------------------------------------------------------

Stepper::Stepper(Scheme scheme, const Stencil& stencil, const FilterSpec* filter, std::vector<double> k, double dx)
    : scheme_(std::move(scheme)), stencil_(stencil), filter_(filter), k_(std::move(k)), dx_(dx) {
  const std::size_t w = static_cast<std::size_t>(std::max(stencil.halfwidth(), filter ? filter->halfwidth() : 0));
  if (k_.size() < 2 * w + 1) throw SizeError("grid is shorter than the stencil or filter");
  auto betas_or_empty = [](const RKScheme& s) {
    try {
      return coeffs_to_betas(s).betas;
    } catch (const ZeroCoefficient&) {
      return std::vector<double>{};
    }
  };
  if (auto* rk = std::get_if<RKScheme>(&scheme_)) {
    betas_.push_back(betas_or_empty(*rk));
  } else if (auto* cs = std::get_if<CompositeScheme>(&scheme_)) {
    betas_.push_back(betas_or_empty(cs->first));
    betas_.push_back(betas_or_empty(cs->second));
  }
  double dsum = 0.0;
  for (double d : stencil.d) dsum += std::abs(d);
  operator_bound_ = 2.0 * dsum / dx + *std::max_element(k_.begin(), k_.end());
}

int Stepper::substeps() const { return std::holds_alternative<CompositeScheme>(scheme_) ? 2 : 1; }

void Stepper::advance(const RKScheme& scheme, const std::vector<double>& betas, WaveState& state, double dt) {
  if (!betas.empty()) {
    const int p = scheme.stages();
    scaled_rhs(state, stencil_, k_, dx_, dt, deriv_);
    for (int j = 1; j < p; ++j) {
      axpy(betas[static_cast<std::size_t>(j - 1)], deriv_, state, stage_);
      scaled_rhs(stage_, stencil_, k_, dx_, dt, deriv_);
    }
    axpy(betas[static_cast<std::size_t>(p - 1)], deriv_, state, state);
    return;
  }
  // The operator is linear, so sum_j c_j (dt L)^j U works for any coefficients.
  stage_ = state;
  for (int j = 1; j <= scheme.stages(); ++j) {
    scaled_rhs(stage_, stencil_, k_, dx_, dt, deriv_);
    std::swap(stage_, deriv_);
    axpy(scheme.c(j), stage_, state, state);
  }
}

void Stepper::advance_exact(WaveState& state, double dt) {
  const int pieces = std::max(1, static_cast<int>(std::ceil(dt * operator_bound_)));
  const double h = dt / pieces;
  for (int piece = 0; piece < pieces; ++piece) {
    stage_ = state;
    for (int j = 1; j <= 60; ++j) {
      scaled_rhs(stage_, stencil_, k_, dx_, h / j, deriv_);
      std::swap(stage_, deriv_);
      axpy(1.0, stage_, state, state);
      const double term = std::max(sup_norm(stage_.p), sup_norm(stage_.v));
      const double total = std::max(sup_norm(state.p), sup_norm(state.v));
      if (term <= 1e-18 * total) break;
    }
  }
}

void Stepper::filter(WaveState& state) const {
  if (filter_ == nullptr) return;
  state.p = apply_filter(state.p, *filter_);
  state.v = apply_filter(state.v, *filter_);
}

void Stepper::step(WaveState& state, double dt) {
  if (state.p.size() != k_.size() || state.v.size() != k_.size()) throw SizeError("state does not match the grid");
  if (auto* rk = std::get_if<RKScheme>(&scheme_)) {
    advance(*rk, betas_[0], state, dt);
    filter(state);
  } else if (auto* cs = std::get_if<CompositeScheme>(&scheme_)) {
    advance(cs->first, betas_[0], state, dt);
    filter(state);
    advance(cs->second, betas_[1], state, dt);
    filter(state);
  } else {
    advance_exact(state, dt);
    filter(state);
  }
}

// --- benchmark ------------------------------------------------------------------

double snap_dt(const Scheme& s, double T, double dt) {
  if (!(dt > 0) || !std::isfinite(dt) || !(T > 0)) throw ValidationError("dt and T must be positive");
  const bool pairs = std::holds_alternative<CompositeScheme>(s);
  double n = std::round(T / dt);
  if (pairs) n = 2.0 * std::round(T / dt / 2.0);
  n = std::max(n, pairs ? 2.0 : 1.0);
  return T / n;
}

BenchResult run_benchmark(const WaveProblem& problem, const Scheme& scheme, double dt, const Stencil& stencil,
                          const FilterSpec* filter) {
  problem.validate();
  const double T = problem.final_time;
  const double h = snap_dt(scheme, T, dt);
  const long steps = std::lround(T / h);

  BenchResult r;
  r.scheme = scheme_name(scheme);
  r.dt = h;
  r.cfl = h / problem.dx();
  r.effort = stages_per_step(scheme) * stencil.halfwidth() * static_cast<double>(steps) * problem.points();

  WaveState state = initial_state(problem);
  Stepper stepper(scheme, stencil, filter, damping_samples(problem), problem.dx());
  const int per_call = stepper.substeps();
  for (long s = 0; s < steps; s += per_call) {
    stepper.step(state, h);
    if ((s / per_call) % 16 == 0 && !finite_and_bounded(state)) break;
  }
  if (!finite_and_bounded(state)) {
    r.error = std::numeric_limits<double>::infinity();
    r.stable = false;
    return r;
  }

  const WaveState exact = analytic_solution(problem, T);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < exact.p.size(); ++i) {
    num = std::max({num, std::abs(state.p[i] - exact.p[i]), std::abs(state.v[i] - exact.v[i])});
    den = std::max({den, std::abs(exact.p[i]), std::abs(exact.v[i])});
  }
  r.error = num / den;
  r.stable = std::isfinite(r.error) && r.error < 10.0;
  return r;
}

namespace {

struct Cell {
  std::size_t scheme;
  double dt;
};

std::vector<Cell> sweep_cells(std::span<const Scheme> schemes, std::span<const double> dts) {
  std::vector<double> sorted(dts.begin(), dts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (double dt : sorted) cells.push_back({s, dt});
  }
  return cells;
}

void validate_sweep(const WaveProblem& problem, std::span<const double> dts) {
  problem.validate();
  for (double dt : dts) {
    if (!(dt > 0) || !std::isfinite(dt)) throw ValidationError("time steps must be positive");
  }
}

}  // namespace

std::vector<BenchResult> sweep(const WaveProblem& problem, std::span<const Scheme> schemes,
                               std::span<const double> dts, const Stencil& stencil, const FilterSpec* filter) {
  validate_sweep(problem, dts);
  const auto cells = sweep_cells(schemes, dts);
  std::vector<BenchResult> out(cells.size());
  const long n = static_cast<long>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = run_benchmark(problem, schemes[c.scheme], c.dt, stencil, filter);
  }
  return out;
}

std::vector<BenchResult> sweep_serial(const WaveProblem& problem, std::span<const Scheme> schemes,
                                      std::span<const double> dts, const Stencil& stencil,
                                      const FilterSpec* filter) {
  validate_sweep(problem, dts);
  std::vector<BenchResult> out;
  for (const auto& c : sweep_cells(schemes, dts)) {
    out.push_back(run_benchmark(problem, schemes[c.scheme], c.dt, stencil, filter));
  }
  return out;
}

std::string to_csv(std::span<const BenchResult> results) {
  std::ostringstream os;
  os << "scheme,dt,cfl,error,effort,stable\n";
  for (const auto& r : results) {
    os << r.scheme << ',' << text::format_double(r.dt) << ',' << text::format_double(r.cfl) << ','
       << text::format_double(r.error) << ',' << text::format_double(r.effort) << ',' << (r.stable ? 1 : 0)
       << '\n';
  }
  return os.str();
}

double noise_floor(const WaveProblem& problem, const Stencil& stencil, const FilterSpec* filter) {
  return run_benchmark(problem, ExactScheme{}, problem.dx(), stencil, filter).error;
}

std::vector<double> BenchConfig::dts() const {
  std::vector<double> out;
  for (double c : cfls) out.push_back(c * problem.dx());
  return out;
}

BenchConfig parse_bench_config(std::string_view content) {
  BenchConfig cfg;
  auto& pb = cfg.problem;
  bool have_cfl = false;
  for (const auto& [key, value] : text::parse_config(content)) {
    auto number = [&] { return text::parse_double(value, key); };
    auto integer = [&] { return static_cast<int>(text::parse_int(value, key)); };
    if (key == "name") cfg.name = value;
    else if (key == "length") pb.length = number();
    else if (key == "ppw") pb.ppw = integer();
    else if (key == "final_time") pb.final_time = number();
    else if (key == "packet_center") pb.packet_center = number();
    else if (key == "packet_width") pb.packet_width = number();
    else if (key == "wavelength") pb.wavelength = number();
    else if (key == "damping_start") pb.damping_start = number();
    else if (key == "damping_width") pb.damping_width = number();
    else if (key == "damping_integral") pb.damping_integral = number();
    else if (key == "damping_power") pb.damping_power = integer();
    else if (key == "stencil") cfg.stencil = value;
    else if (key == "stencils") cfg.stencil_file = value;
    else if (key == "filter") cfg.filter = value;
    else if (key == "filter_strength") cfg.filter_strength = number();
    else if (key == "schemes") cfg.schemes = text::split_list(value);
    else if (key == "cfl" || key == "cfl_range") {
      if (have_cfl) throw ParseError("give either cfl or cfl_range, not both");
      have_cfl = true;
      std::vector<double> xs;
      for (const auto& item : text::split_list(value)) xs.push_back(text::parse_double(item, key));
      if (key == "cfl") {
        cfg.cfls = xs;
      } else {
        if (xs.size() != 3) throw ParseError("cfl_range needs <max>,<min>,<count>");
        const int n = static_cast<int>(xs[2]);
        if (xs[2] != n || n < 1 || !(xs[0] >= xs[1]) || !(xs[1] > 0)) {
          throw ValidationError("cfl_range needs max >= min > 0 and an integer count >= 1");
        }
        for (int i = 0; i < n; ++i) {
          cfg.cfls.push_back(n == 1 ? xs[0] : xs[0] * std::pow(xs[1] / xs[0], static_cast<double>(i) / (n - 1)));
        }
      }
    } else {
      throw ParseError("unknown bench config key '" + key + "'");
    }
  }
  pb.validate();
  if (cfg.schemes.empty()) throw ValidationError("bench config needs at least one scheme");
  if (!(cfg.filter_strength > 0 && cfg.filter_strength <= 1)) {
    throw ValidationError("filter_strength must be in (0, 1]");
  }
  for (double c : cfg.cfls) {
    if (!(c > 0) || !std::isfinite(c)) throw ValidationError("CFL values must be positive");
  }
  return cfg;
}

}  // namespace rkwave
