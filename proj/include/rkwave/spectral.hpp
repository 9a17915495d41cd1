#pragma once

// Frequency-domain accuracy and stability of the schemes in schemes.hpp.
//
// Everything here is evaluated through the amplification *defect*
//   d(z) = r(z) exp(i z) - 1,
// which is computed without cancellation for small |z|. This keeps the phase
// and amplification errors of high-order schemes meaningful well below
// double-precision epsilon (e.g. RK12 at |z| = 1e-3).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rkwave/schemes.hpp"

namespace rkwave {

/// log(1 + u) and exp(u) - 1 for complex u, accurate for small |u|.
cplx log1p(cplx u);
cplx expm1(cplx u);

/// r(z) e^{iz} - 1 for a single-step scheme.
cplx amplification_defect(const RKScheme& scheme, cplx z);

/// Defect of one application of `s`, relative to the exact factor over the
/// same time span: r1 r2 e^{2iz} - 1 for composites, 0 for the exact scheme.
/// With `rescaled`, the cost-normalized per-dt defect w e^{iz} - 1 of the
/// (4/p)-th root instead (p = total stages of one application), using the root
/// that minimizes it. Rescaled throws DegenerateAmplification when r_p = 0.
cplx defect(const Scheme& s, cplx z, bool rescaled = false);

/// The rescaled amplification factor w = (r_p(z p/4))^{4/p}; composites use
/// r1 r2 at z (p1+p2)/8, i.e. a (p1+p2)-stage step spanning 2 dt'.
cplx rescaled_amplification(const Scheme& s, cplx z);

struct EffectiveFrequency {
  cplx omega_bar_dt;
};

/// omega_bar dt = i log r on the branch nearest z. Composites average the two
/// per-step frequencies. Throws DegenerateAmplification when r = 0.
EffectiveFrequency effective_frequency(const Scheme& s, cplx z, bool rescaled = false);

/// |omega_bar / omega - 1|. Throws UndefinedAtZero for z == 0 and
/// DegenerateAmplification for r == 0.
double phase_error(const Scheme& s, cplx z, bool rescaled = false);

/// |r e^{iz} - 1| (per double step for composites, per dt when rescaled).
double amp_error(const Scheme& s, cplx z, bool rescaled = false);

/// (T / dt) eps_r: relative global error after T for a per-step error eps_r.
double global_error_estimate(double eps_r, double T, double dt);

/// Non-throwing point evaluation used by maps: 0 at z == 0, +inf where r == 0.
enum class ErrorKind : std::uint8_t { phase, amplification };
double point_error(const Scheme& s, cplx z, ErrorKind kind, bool rescaled);

// ---------------------------------------------------------------------------
// Small-step stability (leading term of Re log(r / r_e) for real omega dt)

enum class SmallStepStability : std::uint8_t { stable, unstable, marginal };

/// Re log(r(x)/r_e(x)) ~ coefficient * x^power as x -> 0+.
struct GrowthTerm {
  int order_used = 0;  // effective order q after skipping vanishing terms
  int power = 0;
  double coefficient = 0.0;
};

/// Returns nullopt when every term vanishes (exact to all orders checked).
std::optional<GrowthTerm> small_dt_growth(const RKScheme& scheme);
SmallStepStability small_dt_stability_sign(const Scheme& s);

/// log |r(x)| for real x, computed from the defect so it stays accurate for
/// |r| within 1e-16 of one. Per application, or per dt when rescaled.
double log_modulus(const Scheme& s, double x, bool rescaled = false);

/// |r e^{iz} / r| < 1 diagnostic ratio |r / r_e| at z (per application).
double growth_ratio(const Scheme& s, cplx z);

// ---------------------------------------------------------------------------
// Stability and accuracy limits (in units of pi)

inline constexpr double kEtaCap = 4.0;

/// Largest eta with |r(x)| <= 1 + 1e-12 for all x in (0, pi eta]; 0 when the
/// scheme is unstable for arbitrarily small x; capped at kEtaCap.
double stability_limit(const Scheme& s, bool rescaled = false);

/// Largest eta with eps_r < delta on (0, pi eta] (real segment) or on the disc
/// |z| < pi eta (complex_disc). Capped at kEtaCap.
double accuracy_limit(const Scheme& s, double delta, bool complex_disc, bool rescaled = false);

struct LimitReport {
  double eta_s = 0.0;
  std::map<double, double> eta_delta;
  std::map<double, double> eta_hat_delta;
  bool rescaled = false;
};

LimitReport limit_report(const Scheme& s, std::span<const double> deltas, bool rescaled);

// ---------------------------------------------------------------------------
// Error maps over a rectilinear grid of complex omega dt

struct GridSpec {
  double re_min = 0.0;
  double re_max = 1.0;
  double im_min = 0.0;
  double im_max = 1.0;
  int nx = 2;
  int ny = 2;

  /// Throws GridError for inverted/empty ranges or fewer than 2 points.
  void validate() const;
  double re(int ix) const;
  double im(int iy) const;
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

/// Row-major values, iy (imaginary part) outer, both ascending.
struct ErrorMap {
  GridSpec grid;
  ErrorKind kind = ErrorKind::phase;
  std::vector<double> values;
};

enum class AccuracyClass : std::uint8_t { better_than_1e3, better_than_1e2, worse };

struct WinnerMap {
  GridSpec grid;
  ErrorKind kind = ErrorKind::phase;
  std::vector<int> winner;
  std::vector<AccuracyClass> accuracy_class;
  std::vector<double> best;  // error of the winning scheme
};

AccuracyClass classify(double error);

/// OpenMP-parallel over grid points. Output is independent of thread count.
ErrorMap error_map(const Scheme& s, const GridSpec& grid, ErrorKind kind, bool rescaled);
/// Single-threaded reference of error_map, kept for testing and benchmarking.
ErrorMap error_map_serial(const Scheme& s, const GridSpec& grid, ErrorKind kind, bool rescaled);

/// Ties go to the lowest contestant index. Needs at least one contestant.
WinnerMap winner_map(std::span<const Scheme> contestants, const GridSpec& grid, ErrorKind kind,
                     bool rescaled);

// Serialization (byte-deterministic).
std::string to_csv(const ErrorMap& map);
std::string to_csv(const WinnerMap& map);
/// 8-bit binary PGM, top row = largest Im; log10(eps) clamped to [-6, 0]
/// mapped to [255, 0].
std::string to_pgm(const ErrorMap& map);
std::uint8_t gray_level(double error);
/// Binary PPM; hue by winner, shade by accuracy class (violet when worse).
std::string to_ppm(const WinnerMap& map);

}  // namespace rkwave
