#pragma once

// Periodic 1D damped wave benchmark
//
//   dp/dt + dv/dx = -k(x) p,    dv/dt + dp/dx = -k(x) v,    x in [0, L),
//
// discretized with central finite differences and an explicit selective
// filter, advanced with any scheme from schemes.hpp.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkwave/schemes.hpp"

namespace rkwave {

enum class StencilFamily : std::uint8_t { maximal, drp, custom };

/// Antisymmetric first-derivative stencil: (du/dx)_i = sum_j d_j (u_{i+j} - u_{i-j}) / dx.
struct Stencil {
  std::string name;
  int order = 0;
  std::vector<double> d;  // d_1..d_w
  StencilFamily family = StencilFamily::custom;

  int halfwidth() const { return static_cast<int>(d.size()); }
  /// Modified wavenumber times dx: 2 sum_j d_j sin(j theta).
  double modified_wavenumber(double theta) const;
};

/// Symmetric filter: (F u)_i = u_i - strength * sum_{|j|<=w} f_|j| u_{i+j}.
/// Transfer function D(theta) = f_0 + 2 sum_j f_j cos(j theta).
struct FilterSpec {
  std::string name;
  int order = 0;
  std::vector<double> f;  // f_0..f_w
  double strength = 1.0;

  int halfwidth() const { return static_cast<int>(f.size()) - 1; }
  double transfer(double theta) const;
};

/// Maximal-order (order 2w) central stencil with 2w+1 points, named
/// "central<2w+1>".
Stencil maximal_stencil(int halfwidth);

/// Maximally flat filter F_{2n,2m}: D vanishes to order 2n at theta = 0 and
/// 1 - D to order 2m at theta = pi, with half-width n + m - 1. Named "F<2n>"
/// when m = 1, else "F<2n>_<2m>".
FilterSpec standard_filter(int order_zero, int order_pi = 2);

/// Stencil/filter file:
///   stencil <name> halfwidth=<w> order=<q>   then  d <j> <decimal>  ...  end
///   filter <name> halfwidth=<w> [order=<q>]  then  f <j> <decimal>  ...  end
struct StencilLibrary {
  std::vector<Stencil> stencils;
  std::vector<FilterSpec> filters;

  const Stencil& stencil(std::string_view name) const;
  const FilterSpec& filter(std::string_view name) const;
};
StencilLibrary parse_stencils(std::string_view content);
std::string_view bundled_stencil_text();
/// central3..central21, F2..F16, F16_4, and the bundled file (DRP stencil).
StencilLibrary builtin_stencils();

// ---------------------------------------------------------------------------

struct WaveProblem {
  double length = 24.0;
  int ppw = 24;
  double final_time = 24.0;
  // Initial packet exp(-ln2 ((x - x_s)/width)^2) cos(2 pi (x - x_s)/wavelength), periodized.
  double packet_center = 6.0;
  double packet_width = 2.0;
  double wavelength = 1.0;
  // Damping A sin^(2 n)(pi (x - start)/width) on [start, start + width], with
  // n = damping_power and A chosen so that its integral is `damping_integral`.
  double damping_start = 12.0;
  double damping_width = 2.0;
  double damping_integral = 6.0;
  int damping_power = 1;

  /// Throws ValidationError for non-positive sizes, a non-integer number of
  /// grid points, or a damping region outside the domain.
  void validate() const;
  int points() const;
  double dx() const { return 1.0 / ppw; }
  double x(int i) const { return i * dx(); }
  double damping(double x) const;
  /// Antiderivative of the periodically extended damping, K(0) = 0.
  double damping_antiderivative(double x) const;
  /// p(x, 0) = v(x, 0).
  double initial(double x) const;
};

struct WaveState {
  std::vector<double> p;
  std::vector<double> v;
};

WaveState initial_state(const WaveProblem& problem);

/// Central convolution divided by dx with periodic wrap. Throws SizeError if
/// the array is shorter than the stencil.
std::vector<double> spatial_derivative(std::span<const double> u, const Stencil& stencil, double dx);
std::vector<double> apply_filter(std::span<const double> u, const FilterSpec& filter);

/// Semi-discrete time derivative with k sampled on the grid.
WaveState rhs(const WaveState& state, const Stencil& stencil, std::span<const double> k, double dx);

/// Advances one dt for RK schemes, or one 2 dt double step for composites,
/// filtering after every dt. `filter` may be null. The exact scheme applies
/// exp(dt L) of the semi-discrete operator L by a Taylor series on substeps
/// small enough that the series converges to round-off.
class Stepper {
 public:
  Stepper(Scheme scheme, const Stencil& stencil, const FilterSpec* filter, std::vector<double> k, double dx);
  void step(WaveState& state, double dt);
  /// Steps taken by one call of step(): 1, or 2 for composites.
  int substeps() const;

 private:
  void advance(const RKScheme& scheme, const std::vector<double>& betas, WaveState& state, double dt);
  void advance_exact(WaveState& state, double dt);
  void filter(WaveState& state) const;

  Scheme scheme_;
  const Stencil& stencil_;
  const FilterSpec* filter_;
  std::vector<double> k_;
  double dx_;
  double operator_bound_;
  std::vector<std::vector<double>> betas_;  // per member; empty => power form
  WaveState stage_, work_, deriv_;
};

/// Closed-form solution by characteristics; valid because p0 = v0 and the two
/// damping coefficients coincide.
WaveState analytic_solution(const WaveProblem& problem, double t);

struct BenchResult {
  std::string scheme;
  double dt = 0.0;
  double cfl = 0.0;
  double error = 0.0;
  double effort = 0.0;
  bool stable = false;
};

/// Snaps dt to T/n for the nearest integer n >= 1 (even n for composites).
double snap_dt(const Scheme& s, double T, double dt);

/// Runs to T with the snapped dt and reports the relative sup-norm error.
/// Diverged runs report error = inf and stable = false.
BenchResult run_benchmark(const WaveProblem& problem, const Scheme& scheme, double dt, const Stencil& stencil,
                          const FilterSpec* filter);

/// Runs every (scheme, dt) cell in parallel; results are scheme-major with dt
/// descending.
std::vector<BenchResult> sweep(const WaveProblem& problem, std::span<const Scheme> schemes,
                               std::span<const double> dts, const Stencil& stencil, const FilterSpec* filter);
std::vector<BenchResult> sweep_serial(const WaveProblem& problem, std::span<const Scheme> schemes,
                                      std::span<const double> dts, const Stencil& stencil,
                                      const FilterSpec* filter);

/// CSV with header scheme,dt,cfl,error,effort,stable.
std::string to_csv(std::span<const BenchResult> results);

/// Error of exact time integration at CFL 1 with the filter applied after
/// every step: what remains once the timestepping error is gone.
double noise_floor(const WaveProblem& problem, const Stencil& stencil, const FilterSpec* filter);

/// `key = value` benchmark config. Problem keys mirror WaveProblem fields
/// (length, ppw, final_time, packet_center, packet_width, wavelength,
/// damping_start, damping_width, damping_integral, damping_power); further
/// keys: name, stencil, filter (name or "none"), filter_strength, schemes
/// (comma list), cfl (comma list) or cfl_range = <max>,<min>,<count>
/// (geometric), stencils (extra stencil file).
struct BenchConfig {
  std::string name = "bench";
  WaveProblem problem;
  std::string stencil = "central7";
  std::string filter = "F6";
  double filter_strength = 0.2;
  std::vector<std::string> schemes;
  std::vector<double> cfls;
  std::string stencil_file;

  std::vector<double> dts() const;
};
BenchConfig parse_bench_config(std::string_view content);

}  // namespace rkwave
