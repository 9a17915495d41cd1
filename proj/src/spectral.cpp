#include "rkwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rkwave/errors.hpp"
#include "rkwave/text.hpp"

namespace rkwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx kI{0.0, 1.0};

// Below this radius the defect is summed as a series; above it the direct
// difference r e^{iz} - 1 is accurate enough.
constexpr double kSeriesRadius = 2.0;

constexpr double kStabilityTol = 1e-12;
constexpr double kScanStep = 1e-3;
constexpr double kDiscScanStep = 2e-3;
constexpr double kBisectTol = 1e-9;
constexpr int kDiscRays = 720;

cplx exp_iz(cplx z) { return std::exp(kI * z); }


cplx composite_defect(const CompositeScheme& cs, cplx z) {
  const cplx d1 = amplification_defect(cs.first, z);
  const cplx d2 = amplification_defect(cs.second, z);
  return d1 + d2 + d1 * d2;
}

cplx unscaled_defect(const Scheme& s, cplx z) {
  if (auto* rk = std::get_if<RKScheme>(&s)) return amplification_defect(*rk, z);
  if (auto* cs = std::get_if<CompositeScheme>(&s)) return composite_defect(*cs, z);
  return 0.0;
}

void require_nonzero(cplx r) {
  if (r == 0.0) throw DegenerateAmplification("amplification factor is zero");
}

// Root of (1 + d)^{4/P} minimizing |root - 1|, returned as root - 1.
cplx rescaled_root_defect(cplx d, int total_stages) {
  const cplx log_factor = log1p(d);
  const double exponent = 4.0 / total_stages;
  cplx best = expm1(exponent * log_factor);
  double best_abs = std::abs(best);
  for (int k = 1; k < total_stages; ++k) {
    const cplx cand = expm1(exponent * (log_factor + cplx(0.0, 2.0 * kPi * k)));
    const double a = std::abs(cand);
    if (a < best_abs) {
      best = cand;
      best_abs = a;
    }
  }
  return best;
}

// Per-dt log(r / r_e) on the branch nearest zero; omega_bar dt = z + i * result.
cplx log_defect_per_dt(const Scheme& s, cplx z, bool rescaled) {
  if (std::holds_alternative<ExactScheme>(s)) return 0.0;
  if (rescaled) {
    const cplx u = defect(s, z, true);
    return log1p(u);
  }
  auto checked_log = [z](const RKScheme& rk) {
    require_nonzero(amplification(rk, z));
    return log1p(amplification_defect(rk, z));
  };
  if (auto* rk = std::get_if<RKScheme>(&s)) return checked_log(*rk);
  const auto& cs = std::get<CompositeScheme>(s);
  return 0.5 * (checked_log(cs.first) + checked_log(cs.second));
}

double power_sign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// Largest point of [lo, hi] where `bad` is false, given bad(lo) false and
// bad(hi) true.
template <class Pred>
double bisect_boundary(double lo, double hi, Pred bad) {
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (bad(mid)) hi = mid;
    else lo = mid;
  }
  return lo;
}

// First radius along direction `dir` where bad() holds, scanning with `step`
// up to `limit`; returns `limit` when none is found.
template <class Pred>
double first_crossing(double step, double limit, Pred bad) {
  double prev = 0.0;
  for (long k = 1;; ++k) {
    const double r = std::min(step * static_cast<double>(k), limit);
    if (bad(r)) return bisect_boundary(prev, r, bad);
    if (r >= limit) return limit;
    prev = r;
  }
}

}  // namespace

cplx log1p(cplx u) {
  const double a = u.real();
  const double b = u.imag();
  const double re = 0.5 * std::log1p(2.0 * a + a * a + b * b);
  const double im = std::atan2(b, 1.0 + a);
  return {re, im};
}

cplx expm1(cplx u) {
  const double ea = std::expm1(u.real());
  const double s = std::sin(0.5 * u.imag());
  const double re = ea * std::cos(u.imag()) - 2.0 * s * s;
  const double im = (ea + 1.0) * std::sin(u.imag());
  return {re, im};
}

cplx amplification_defect(const RKScheme& scheme, cplx z) {
  if (z == 0.0) return 0.0;
  if (std::abs(z) > kSeriesRadius) return amplification(scheme, z) * exp_iz(z) - 1.0;

  // r - e^{-iz} = sum_{j<=p} (c_j - 1/j!) w^j - sum_{j>p} w^j / j!,  w = -iz.
  const cplx w(z.imag(), -z.real());
  const int p = scheme.stages();
  cplx head = 0.0;
  for (int j = p; j >= 1; --j) head = (head + (scheme.c(j) - inv_factorial(j))) * w;

  cplx term = 1.0;
  for (int k = 1; k <= p + 1; ++k) term *= w / static_cast<double>(k);
  cplx tail = 0.0;
  for (int j = p + 1; j < p + 120; ++j) {
    tail += term;
    term *= w / static_cast<double>(j + 1);
    if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
  }
  return (head - tail) * exp_iz(z);
}

cplx defect(const Scheme& s, cplx z, bool rescaled) {
  if (std::holds_alternative<ExactScheme>(s)) return 0.0;
  if (!rescaled) return unscaled_defect(s, z);
  const int stages = application_stages(s);
  if (auto* rk = std::get_if<RKScheme>(&s)) {
    if (stages == 4) return amplification_defect(*rk, z);
    const cplx y = z * (stages / 4.0);
    require_nonzero(amplification(*rk, y));
    return rescaled_root_defect(amplification_defect(*rk, y), stages);
  }
  const auto& cs = std::get<CompositeScheme>(s);
  const cplx y = z * (stages / 8.0);
  require_nonzero(composite_amplification(cs, y));
  return rescaled_root_defect(composite_defect(cs, y), stages);
}

cplx rescaled_amplification(const Scheme& s, cplx z) {
  if (auto* rk = std::get_if<RKScheme>(&s); rk && rk->stages() == 4) return amplification(*rk, z);
  return (1.0 + defect(s, z, true)) * std::exp(-kI * z);
}

EffectiveFrequency effective_frequency(const Scheme& s, cplx z, bool rescaled) {
  return {z + kI * log_defect_per_dt(s, z, rescaled)};
}

double phase_error(const Scheme& s, cplx z, bool rescaled) {
  if (z == 0.0) throw UndefinedAtZero("phase error is undefined at omega dt = 0");
  return std::abs(log_defect_per_dt(s, z, rescaled)) / std::abs(z);
}

double amp_error(const Scheme& s, cplx z, bool rescaled) {
  try {
    return std::abs(defect(s, z, rescaled));
  } catch (const DegenerateAmplification&) {
    return 1.0;  // r == 0: |0 - r_e| / |r_e|
  }
}

double global_error_estimate(double eps_r, double T, double dt) { return (T / dt) * eps_r; }

double point_error(const Scheme& s, cplx z, ErrorKind kind, bool rescaled) {
  if (kind == ErrorKind::amplification) return amp_error(s, z, rescaled);
  if (z == 0.0) return 0.0;
  try {
    return phase_error(s, z, rescaled);
  } catch (const DegenerateAmplification&) {
    return kInf;
  }
}

std::optional<GrowthTerm> small_dt_growth(const RKScheme& scheme) {
  auto delta = [&](int j) { return scheme.c(j) - inv_factorial(j); };
  const int p = scheme.stages();
  for (int q = order_of_accuracy(scheme); q <= p + 2; ++q) {
    GrowthTerm t;
    t.order_used = q;
    if (q % 2 == 0) {
      const int n = q / 2;
      t.power = 2 * n + 2;
      t.coefficient = power_sign(n + 1) * (delta(2 * n + 2) - delta(2 * n + 1));
    } else {
      const int n = (q + 1) / 2;
      t.power = 2 * n;
      t.coefficient = power_sign(n) * delta(2 * n);
    }
    if (std::abs(t.coefficient) > 1e-13 * inv_factorial(t.power - 1)) return t;
  }
  return std::nullopt;
}

SmallStepStability small_dt_stability_sign(const Scheme& s) {
  std::optional<GrowthTerm> term;
  if (auto* rk = std::get_if<RKScheme>(&s)) term = small_dt_growth(*rk);
  else if (auto* cs = std::get_if<CompositeScheme>(&s)) term = small_dt_growth(merged_double_step(*cs));
  if (!term) return SmallStepStability::marginal;
  return term->coefficient < 0.0 ? SmallStepStability::stable : SmallStepStability::unstable;
}

double log_modulus(const Scheme& s, double x, bool rescaled) {
  const cplx d = defect(s, cplx(x, 0.0), rescaled);
  if (std::abs(1.0 + d) == 0.0) return -kInf;
  return log1p(d).real();
}

double growth_ratio(const Scheme& s, cplx z) { return std::abs(1.0 + unscaled_defect(s, z)); }

double stability_limit(const Scheme& s, bool rescaled) {
  if (std::holds_alternative<ExactScheme>(s)) return kEtaCap;
  if (small_dt_stability_sign(s) == SmallStepStability::unstable) return 0.0;
  const double tol = std::log1p(kStabilityTol);
  auto unstable = [&](double x) {
    try {
      return log_modulus(s, x, rescaled) > tol;
    } catch (const DegenerateAmplification&) {
      return false;  // |r| = 0 is stable
    }
  };
  return first_crossing(kScanStep, kPi * kEtaCap, unstable) / kPi;
}

double accuracy_limit(const Scheme& s, double delta, bool complex_disc, bool rescaled) {
  if (!(delta > 0.0)) throw ValidationError("accuracy threshold must be positive");
  if (std::holds_alternative<ExactScheme>(s)) return kEtaCap;
  const double cap = kPi * kEtaCap;
  if (!complex_disc) {
    return first_crossing(kScanStep, cap, [&](double x) {
             return amp_error(s, cplx(x, 0.0), rescaled) >= delta;
           }) /
           kPi;
  }
  // Rays are independent; the running minimum only prunes scans that cannot
  // lower the result, so the outcome does not depend on ray order.
  double best = cap;
  for (int k = 0; k < kDiscRays; ++k) {
    const double theta = 2.0 * kPi * k / kDiscRays;
    const cplx dir = std::polar(1.0, theta);
    const double r = first_crossing(kDiscScanStep, best, [&](double rho) {
      return amp_error(s, rho * dir, rescaled) >= delta;
    });
    best = std::min(best, r);
  }
  return best / kPi;
}

LimitReport limit_report(const Scheme& s, std::span<const double> deltas, bool rescaled) {
  LimitReport rep;
  rep.rescaled = rescaled;
  rep.eta_s = stability_limit(s, rescaled);
  for (double d : deltas) {
    rep.eta_delta[d] = accuracy_limit(s, d, false, rescaled);
    rep.eta_hat_delta[d] = accuracy_limit(s, d, true, rescaled);
  }
  return rep;
}

// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(re_min) || !finite(re_max) || !finite(im_min) || !finite(im_max)) {
    throw GridError("grid range must be finite");
  }
  if (!(re_min < re_max) || !(im_min < im_max)) throw GridError("grid range is empty or inverted");
  if (nx < 2 || ny < 2) throw GridError("grid needs at least 2 points per axis");
}

double GridSpec::re(int ix) const { return re_min + (re_max - re_min) * ix / (nx - 1); }
double GridSpec::im(int iy) const { return im_min + (im_max - im_min) * iy / (ny - 1); }

AccuracyClass classify(double error) {
  if (error < 1e-3) return AccuracyClass::better_than_1e3;
  if (error < 1e-2) return AccuracyClass::better_than_1e2;
  return AccuracyClass::worse;
}

ErrorMap error_map_serial(const Scheme& s, const GridSpec& grid, ErrorKind kind, bool rescaled) {
  grid.validate();
  ErrorMap map{grid, kind, std::vector<double>(grid.size())};
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      map.values[grid.index(ix, iy)] = point_error(s, cplx(grid.re(ix), grid.im(iy)), kind, rescaled);
    }
  }
  return map;
}

ErrorMap error_map(const Scheme& s, const GridSpec& grid, ErrorKind kind, bool rescaled) {
  grid.validate();
  ErrorMap map{grid, kind, std::vector<double>(grid.size())};
  const long n = static_cast<long>(grid.size());
  double* out = map.values.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const int ix = static_cast<int>(i % grid.nx);
    const int iy = static_cast<int>(i / grid.nx);
    out[i] = point_error(s, cplx(grid.re(ix), grid.im(iy)), kind, rescaled);
  }
  return map;
}

WinnerMap winner_map(std::span<const Scheme> contestants, const GridSpec& grid, ErrorKind kind,
                     bool rescaled) {
  if (contestants.empty()) throw ValidationError("winner map needs at least one scheme");
  grid.validate();
  WinnerMap map;
  map.grid = grid;
  map.kind = kind;
  map.winner.assign(grid.size(), 0);
  map.accuracy_class.assign(grid.size(), AccuracyClass::worse);
  map.best.assign(grid.size(), kInf);
  const long n = static_cast<long>(grid.size());
  const long m = static_cast<long>(contestants.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const cplx z(grid.re(static_cast<int>(i % grid.nx)), grid.im(static_cast<int>(i / grid.nx)));
    int win = 0;
    double best = point_error(contestants[0], z, kind, rescaled);
    for (long k = 1; k < m; ++k) {
      const double e = point_error(contestants[static_cast<std::size_t>(k)], z, kind, rescaled);
      if (e < best) {
        best = e;
        win = static_cast<int>(k);
      }
    }
    map.winner[static_cast<std::size_t>(i)] = win;
    map.best[static_cast<std::size_t>(i)] = best;
    map.accuracy_class[static_cast<std::size_t>(i)] = classify(best);
  }
  return map;
}

namespace {

const char* class_label(AccuracyClass c) {
  switch (c) {
    case AccuracyClass::better_than_1e3: return "lt1e-3";
    case AccuracyClass::better_than_1e2: return "lt1e-2";
    case AccuracyClass::worse: return "worse";
  }
  return "worse";
}

std::string netpbm_header(const char* magic, const GridSpec& g) {
  return std::string(magic) + "\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n255\n";
}

struct Rgb {
  std::uint8_t r, g, b;
};

// Yellow, green, orange first (maximal order / LDDRK / optimized in figures).
constexpr Rgb kPalette[] = {{255, 230, 0},  {40, 190, 60},   {255, 140, 0},  {40, 120, 255},
                            {230, 40, 40},  {0, 200, 200},   {220, 0, 220},  {150, 100, 50}};
constexpr Rgb kViolet{110, 0, 160};

}  // namespace

std::string to_csv(const ErrorMap& map) {
  std::string out = "re,im,value\n";
  const auto& g = map.grid;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      out += text::format_double(g.re(ix)) + "," + text::format_double(g.im(iy)) + "," +
             text::format_double(map.values[g.index(ix, iy)]) + "\n";
    }
  }
  return out;
}

std::string to_csv(const WinnerMap& map) {
  std::string out = "re,im,value,winner,class\n";
  const auto& g = map.grid;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const auto i = g.index(ix, iy);
      out += text::format_double(g.re(ix)) + "," + text::format_double(g.im(iy)) + "," +
             text::format_double(map.best[i]) + "," + std::to_string(map.winner[i]) + "," +
             class_label(map.accuracy_class[i]) + "\n";
    }
  }
  return out;
}

std::uint8_t gray_level(double error) {
  if (std::isnan(error)) return 0;
  if (error <= 0.0) return 255;
  const double l = std::clamp(std::log10(error), -6.0, 0.0);
  return static_cast<std::uint8_t>(std::lround(-l / 6.0 * 255.0));
}

std::string to_pgm(const ErrorMap& map) {
  const auto& g = map.grid;
  std::string out = netpbm_header("P5", g);
  for (int iy = g.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.nx; ++ix) out.push_back(static_cast<char>(gray_level(map.values[g.index(ix, iy)])));
  }
  return out;
}

std::string to_ppm(const WinnerMap& map) {
  const auto& g = map.grid;
  std::string out = netpbm_header("P6", g);
  constexpr std::size_t kColors = sizeof(kPalette) / sizeof(kPalette[0]);
  for (int iy = g.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const auto i = g.index(ix, iy);
      Rgb c = kPalette[static_cast<std::size_t>(map.winner[i]) % kColors];
      if (map.accuracy_class[i] == AccuracyClass::better_than_1e2) {
        c = {static_cast<std::uint8_t>(c.r / 2), static_cast<std::uint8_t>(c.g / 2),
             static_cast<std::uint8_t>(c.b / 2)};
      } else if (map.accuracy_class[i] == AccuracyClass::worse) {
        c = kViolet;
      }
      out.push_back(static_cast<char>(c.r));
      out.push_back(static_cast<char>(c.g));
      out.push_back(static_cast<char>(c.b));
    }
  }
  return out;
}

}  // namespace rkwave
