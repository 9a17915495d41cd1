#pragma once

// Complex-plane optimization of the free amplification-polynomial
// coefficients c_{q+1}..c_p of a p-stage, order-q scheme.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rkwave/schemes.hpp"

namespace rkwave {

enum class RegionShape : std::uint8_t { rectangle, sector };

/// Rectangle: Re z in [0, pi eta], Im z in [alpha2 pi eta, alpha1 pi eta].
/// Sector:    |z| <= pi eta, arg z in [beta2, beta1].
struct RegionSpec {
  RegionShape shape = RegionShape::sector;
  double eta = 0.5;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  /// Throws ValidationError for eta <= 0, alpha1 < 0 < alpha2, beta2 > beta1
  /// or |beta| >= pi/2. Degenerate (zero-width) regions are valid here.
  void validate() const;
};

/// e: |r - r_e|^2 integrand; E: |omega_bar dt - omega dt|^2.
enum class MetricKind : std::uint8_t { e_amplification, E_frequency };

struct QuadratureSpec {
  int n1 = 64;  // p (rectangle) or rho (sector) direction
  int n2 = 64;  // q or theta direction
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; throws ValidationError for n < 1.
GaussRule gauss_legendre(int n);

/// Area-normalized rectangle metric. Throws DegenerateRegion when
/// alpha1 == alpha2 == 0.
double metric_rectangle(const Scheme& s, const RegionSpec& region, MetricKind kind,
                        QuadratureSpec quad = {}, bool parallel = true);
/// Normalized sector metric with the rho weight. Throws DegenerateRegion when
/// beta1 == beta2.
double metric_sector(const Scheme& s, const RegionSpec& region, MetricKind kind,
                     QuadratureSpec quad = {}, bool parallel = true);
/// Real-axis metric: integral over (0, pi eta] of |f(x)|^2, times x when
/// `radial_weight`.
double metric_1d(const Scheme& s, double eta, MetricKind kind, bool radial_weight = false, int n = 64);

/// Dispatches on the region shape; a zero-width rectangle falls back to the
/// real-axis metric, a zero-angle sector to its rho-weighted limit.
double metric(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad = {});

/// The double integrals before normalization (area elements dp dq and
/// rho drho dtheta).
double integral_rectangle(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad = {});
double integral_sector(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad = {});

struct OptimizationSpec {
  std::string name = "Opt";
  int stages = 6;
  int order = 4;
  RegionSpec region;
  MetricKind metric = MetricKind::e_amplification;
  double stability_floor = 0.0;  // eta_hat_s
  QuadratureSpec quadrature;
  int restarts = 10;

  /// Throws ValidationError unless stages > order >= 1 and the floor and
  /// region are valid.
  void validate() const;
};

struct ConstraintReport {
  /// Leading small-dt growth coefficient; for order 4 this is
  /// (c5 - 1/5!) - (c6 - 1/6!). Negative means stable as dt -> 0.
  double growth_sign = 0.0;
  double eta_s_achieved = 0.0;
};

struct OptimizationResult {
  RKScheme scheme;
  double metric_value = 0.0;
  ConstraintReport constraints;
  int iterations = 0;
  bool converged = false;
};

/// Leading growth coefficient at the declared order, without skipping
/// vanishing terms.
double growth_coefficient_at_order(const RKScheme& scheme, int order);

/// Minimizes the metric over c_{q+1}..c_p starting from `seed` (which must
/// have stages == spec.stages and satisfy the order-q conditions). Throws
/// Infeasible when no point satisfying both stability constraints is found.
/// Deterministic.
OptimizationResult optimize(const OptimizationSpec& spec, const RKScheme& seed);

/// Parses the `key = value` optimization config. Recognised keys: name,
/// stages, order, shape, eta, alpha1, alpha2, beta1, beta2, stability_floor,
/// metric (e|E), quadrature (<n1>x<n2>), restarts, seed.
struct OptimizationConfig {
  OptimizationSpec spec;
  std::string seed;  // empty: maximal order with spec.stages
};
OptimizationConfig parse_optimization_config(std::string_view content);

/// Scheme-file block with a comment header echoing the spec and the result.
std::string format_result(const OptimizationSpec& spec, const OptimizationResult& result);

}  // namespace rkwave
