#include "rkwave/optimizer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "rkwave/errors.hpp"
#include "rkwave/spectral.hpp"
#include "rkwave/text.hpp"

namespace rkwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// |f|^2 at z for the chosen metric.
double integrand(const Scheme& s, cplx z, MetricKind kind) {
  if (std::holds_alternative<ExactScheme>(s)) return 0.0;
  if (kind == MetricKind::e_amplification) {
    // |r - r_e| = |d| |r_e| over one application (two steps for composites).
    const double span = std::holds_alternative<CompositeScheme>(s) ? 2.0 : 1.0;
    const double d = std::abs(defect(s, z));
    return d * d * std::exp(2.0 * span * z.imag());
  }
  try {
    const double e = phase_error(s, z) * std::abs(z);
    return e * e;
  } catch (const DegenerateAmplification&) {
    return kInf;
  }
}

// Tensor-product Gauss sum of g(x, y) over [-1, 1]^2. Node values are filled
// in parallel and summed in a fixed order.
template <class F>
double tensor_sum(const GaussRule& a, const GaussRule& b, bool parallel, F g) {
  const long na = static_cast<long>(a.nodes.size());
  const long nb = static_cast<long>(b.nodes.size());
  std::vector<double> values(static_cast<std::size_t>(na * nb));
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < na * nb; ++k) {
      values[static_cast<std::size_t>(k)] = g(a.nodes[static_cast<std::size_t>(k % na)], b.nodes[static_cast<std::size_t>(k / na)]);
    }
  } else {
    for (long k = 0; k < na * nb; ++k) {
      values[static_cast<std::size_t>(k)] = g(a.nodes[static_cast<std::size_t>(k % na)], b.nodes[static_cast<std::size_t>(k / na)]);
    }
  }
  double total = 0.0;
  for (long j = 0; j < nb; ++j) {
    double row = 0.0;
    for (long i = 0; i < na; ++i) row += a.weights[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(j * na + i)];
    total += b.weights[static_cast<std::size_t>(j)] * row;
  }
  return total;
}

double rectangle_integral(const Scheme& s, const RegionSpec& r, MetricKind kind, QuadratureSpec quad,
                          bool parallel) {
  const double len = kPi * r.eta;
  const double lo = r.alpha2 * len;
  const double height = (r.alpha1 - r.alpha2) * len;
  const auto a = gauss_legendre(quad.n1);
  const auto b = gauss_legendre(quad.n2);
  const double sum = tensor_sum(a, b, parallel, [&](double x, double y) {
    return integrand(s, cplx(0.5 * len * (x + 1.0), lo + 0.5 * height * (y + 1.0)), kind);
  });
  return sum * 0.25 * len * height;
}

double sector_integral(const Scheme& s, const RegionSpec& r, MetricKind kind, QuadratureSpec quad,
                       bool parallel) {
  const double radius = kPi * r.eta;
  const double width = r.beta1 - r.beta2;
  const auto a = gauss_legendre(quad.n1);
  const auto b = gauss_legendre(quad.n2);
  const double sum = tensor_sum(a, b, parallel, [&](double x, double y) {
    const double rho = 0.5 * radius * (x + 1.0);
    const double theta = r.beta2 + 0.5 * width * (y + 1.0);
    return integrand(s, std::polar(rho, theta), kind) * rho;
  });
  return sum * 0.25 * radius * width;
}

double factorial(int n) { return 1.0 / inv_factorial(n); }

int growth_power(int order) { return order % 2 == 0 ? order + 2 : order + 1; }

}  // namespace

void RegionSpec::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("region eta must be positive");
  if (shape == RegionShape::rectangle) {
    if (!(alpha1 >= 0.0) || !(alpha2 <= 0.0) || !std::isfinite(alpha1) || !std::isfinite(alpha2)) {
      throw ValidationError("rectangle needs alpha1 >= 0 >= alpha2");
    }
  } else {
    if (!(beta2 <= beta1) || !(beta1 < kPi / 2) || !(beta2 > -kPi / 2)) {
      throw ValidationError("sector needs -pi/2 < beta2 <= beta1 < pi/2");
    }
  }
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("quadrature needs at least one point");
  // Boost returns the non-negative zeros of P_n in ascending order.
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  GaussRule rule;
  auto weight = [n](double x) {
    const double dp = boost::math::legendre_p_prime(n, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double x : zeros) {
    rule.nodes.push_back(x);
    rule.weights.push_back(weight(x));
  }
  return rule;
}

double integral_rectangle(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad) {
  return rectangle_integral(s, region, kind, quad, true);
}

double integral_sector(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad) {
  return sector_integral(s, region, kind, quad, true);
}

double metric_rectangle(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad,
                        bool parallel) {
  region.validate();
  if (region.shape != RegionShape::rectangle) throw ValidationError("region is not a rectangle");
  if (region.alpha1 == 0.0 && region.alpha2 == 0.0) throw DegenerateRegion("rectangle has zero height");
  const double norm = (std::abs(region.alpha1) + std::abs(region.alpha2)) * kPi * region.eta;
  return rectangle_integral(s, region, kind, quad, parallel) / norm;
}

double metric_sector(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad,
                     bool parallel) {
  region.validate();
  if (region.shape != RegionShape::sector) throw ValidationError("region is not a sector");
  if (region.beta1 == region.beta2) throw DegenerateRegion("sector has zero angle");
  const double norm = (std::abs(region.beta1) + std::abs(region.beta2)) * kPi * region.eta;
  return sector_integral(s, region, kind, quad, parallel) / norm;
}

double metric_1d(const Scheme& s, double eta, MetricKind kind, bool radial_weight, int n) {
  if (!(eta > 0.0)) throw ValidationError("region eta must be positive");
  const auto rule = gauss_legendre(n);
  const double len = kPi * eta;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = 0.5 * len * (rule.nodes[i] + 1.0);
    sum += rule.weights[i] * integrand(s, x, kind) * (radial_weight ? x : 1.0);
  }
  const double integral = 0.5 * len * sum;
  return radial_weight ? integral / len : integral;
}

double metric(const Scheme& s, const RegionSpec& region, MetricKind kind, QuadratureSpec quad) {
  try {
    if (region.shape == RegionShape::rectangle) return metric_rectangle(s, region, kind, quad);
    return metric_sector(s, region, kind, quad);
  } catch (const DegenerateRegion&) {
    if (region.shape == RegionShape::rectangle) return metric_1d(s, region.eta, kind, false, quad.n1);
    if (region.beta1 == 0.0) return metric_1d(s, region.eta, kind, true, quad.n1);
    throw;
  }
}

// ---------------------------------------------------------------------------

void OptimizationSpec::validate() const {
  if (order < 1) throw ValidationError("order must be at least 1");
  if (stages <= order) throw ValidationError("stages must exceed the order (no free coefficients otherwise)");
  if (stages > 32) throw ValidationError("stage count out of range");
  if (!(stability_floor >= 0.0) || stability_floor > kEtaCap) {
    throw ValidationError("stability_floor must be in [0, " + text::format_double(kEtaCap) + "]");
  }
  if (quadrature.n1 < 1 || quadrature.n2 < 1) throw ValidationError("quadrature sizes must be positive");
  if (restarts < 0) throw ValidationError("restarts must be non-negative");
  if (name.empty()) throw ValidationError("scheme name must not be empty");
  region.validate();
}

double growth_coefficient_at_order(const RKScheme& scheme, int order) {
  auto delta = [&](int j) { return scheme.c(j) - inv_factorial(j); };
  if (order % 2 == 0) {
    const int n = order / 2;
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
    return sign * (delta(2 * n + 2) - delta(2 * n + 1));
  }
  const int n = (order + 1) / 2;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n
  return sign * delta(2 * n);
}

namespace {

class Problem {
 public:
  Problem(const OptimizationSpec& spec, const RKScheme& seed) : spec_(spec), seed_(seed) {
    for (int j = spec.order + 1; j <= spec.stages; ++j) free_.push_back(j);
    power_ = growth_power(spec.order);
    const int samples = 400;
    for (int k = 1; k <= samples && spec.stability_floor > 0.0; ++k) {
      xs_.push_back(kPi * spec.stability_floor * k / samples);
    }
    scale_ = std::max(metric_of(seed), 1e-300);
  }

  std::vector<double> start() const {
    std::vector<double> u;
    for (int j : free_) u.push_back(seed_.c(j) * factorial(j));
    return u;
  }

  RKScheme build(const double* u) const {
    std::vector<double> c(seed_.coeffs().begin(), seed_.coeffs().end());
    for (std::size_t k = 0; k < free_.size(); ++k) c[static_cast<std::size_t>(free_[k] - 1)] = u[k] * inv_factorial(free_[k]);
    return RKScheme(spec_.name, spec_.order, std::move(c));
  }

  double metric_of(const RKScheme& s) const {
    return metric(Scheme(s), spec_.region, spec_.metric, spec_.quadrature);
  }

  // Squared, normalized constraint violation with the given margin.
  double violation(const RKScheme& s, double margin) const {
    const double pf = factorial(power_);
    const double v1 = std::max(0.0, growth_coefficient_at_order(s, spec_.order) * pf + margin);
    double v2 = 0.0;
    const Scheme sv(s);
    for (double x : xs_) {
      const double ratio = log_modulus(sv, x) / std::pow(x, power_) * pf;
      v2 = std::max(v2, ratio + margin);
    }
    return v1 * v1 + v2 * v2;
  }

  double objective(const double* u, double weight, double margin) const {
    for (std::size_t k = 0; k < free_.size(); ++k) {
      if (!std::isfinite(u[k])) return 1e300;
    }
    const RKScheme s = build(u);
    const double m = metric_of(s);
    if (!std::isfinite(m)) return 1e300;
    return m + weight * scale_ * violation(s, margin);
  }

  bool feasible(const RKScheme& s, ConstraintReport& report) const {
    const auto growth = small_dt_growth(s);
    report.growth_sign = growth ? growth->coefficient : 0.0;
    report.eta_s_achieved = stability_limit(Scheme(s));
    const bool sign_ok = small_dt_stability_sign(Scheme(s)) == SmallStepStability::stable;
    return sign_ok && report.eta_s_achieved >= spec_.stability_floor - 1e-9;
  }

  std::size_t dims() const { return free_.size(); }

 private:
  const OptimizationSpec& spec_;
  const RKScheme& seed_;
  std::vector<int> free_;
  std::vector<double> xs_;
  int power_ = 0;
  double scale_ = 1.0;
};

struct Evaluation {
  const Problem* problem;
  double weight;
  double margin;
};

double gsl_objective(const gsl_vector* v, void* params) {
  const auto* e = static_cast<const Evaluation*>(params);
  return e->problem->objective(gsl_vector_const_ptr(v, 0), e->weight, e->margin);
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
using VectorPtr = std::unique_ptr<gsl_vector, VectorDeleter>;
using MinimizerPtr = std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter>;

struct SimplexRun {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// One Nelder-Mead run from x0 with an initial simplex of relative spread 0.25.
SimplexRun nelder_mead(const Problem& problem, const std::vector<double>& x0, double weight, double margin) {
  constexpr int kMaxIterations = 20000;
  constexpr double kSizeTol = 1e-10;
  const std::size_t n = x0.size();
  Evaluation eval{&problem, weight, margin};
  gsl_multimin_function fn{&gsl_objective, n, &eval};

  VectorPtr x(gsl_vector_alloc(n));
  VectorPtr step(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(step.get(), i, std::max(0.25 * std::abs(x0[i]), 1e-6));
  }
  MinimizerPtr m(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());

  // A simplex straddling the kink of a penalty term can shrink very slowly;
  // a long run without any decrease of the best value also counts as converged.
  constexpr int kStallLimit = 200;
  SimplexRun run;
  double best_value = gsl_multimin_fminimizer_minimum(m.get());
  int stalled = 0;
  for (run.iterations = 1; run.iterations <= kMaxIterations; ++run.iterations) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), kSizeTol) == GSL_SUCCESS) {
      run.converged = true;
      break;
    }
    const double v = gsl_multimin_fminimizer_minimum(m.get());
    stalled = v < best_value ? 0 : stalled + 1;
    best_value = std::min(best_value, v);
    if (stalled >= kStallLimit) {
      run.converged = true;
      break;
    }
  }
  run.iterations = std::min(run.iterations, kMaxIterations);
  run.value = gsl_multimin_fminimizer_minimum(m.get());
  const gsl_vector* best = gsl_multimin_fminimizer_x(m.get());
  for (std::size_t i = 0; i < n; ++i) run.x.push_back(gsl_vector_get(best, i));
  return run;
}

}  // namespace

OptimizationResult optimize(const OptimizationSpec& spec, const RKScheme& seed) {
  spec.validate();
  if (seed.stages() != spec.stages) throw ValidationError("seed scheme has the wrong stage count");
  if (order_of_accuracy(seed) < spec.order) throw ValidationError("seed scheme violates the order conditions");

  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  const Problem problem(spec, seed);

  // The seed itself competes: near the origin a maximal-order seed can be
  // optimal while sitting on the boundary of the penalized constraint.
  std::optional<OptimizationResult> best;
  ConstraintReport seed_report;
  if (problem.feasible(seed, seed_report)) {
    RKScheme named(spec.name, spec.order, {seed.coeffs().begin(), seed.coeffs().end()});
    best = OptimizationResult{std::move(named), problem.metric_of(seed), seed_report, 0, true};
  }

  int iterations = 0;
  for (double margin : {1e-6, 1e-4, 1e-2}) {
    std::vector<double> x = problem.start();
    SimplexRun run;
    for (int k = 2; k <= 8; ++k) {
      run = nelder_mead(problem, x, std::pow(10.0, k), margin);
      iterations += run.iterations;
      x = run.x;
    }
    for (int r = 0; r < spec.restarts; ++r) {
      SimplexRun again = nelder_mead(problem, x, 1e8, margin);
      iterations += again.iterations;
      const bool improved = again.value < run.value - 1e-14 * std::abs(run.value);
      if (again.value <= run.value) {
        run = again;
        x = run.x;
      }
      if (!improved) break;
    }

    RKScheme scheme = problem.build(x.data());
    ConstraintReport report;
    if (problem.feasible(scheme, report)) {
      const double value = problem.metric_of(scheme);
      if (!best || value < best->metric_value) {
        best = OptimizationResult{std::move(scheme), value, report, 0, run.converged};
      }
      break;
    }
  }
  gsl_set_error_handler(previous);
  if (!best) {
    throw Infeasible("no scheme satisfying the stability constraints was found (stability_floor " +
                     text::format_double(spec.stability_floor) + ")");
  }
  best->iterations = iterations;
  return *best;
}

// ---------------------------------------------------------------------------

OptimizationConfig parse_optimization_config(std::string_view content) {
  const auto kv = text::parse_config(content);
  OptimizationConfig cfg;
  auto& spec = cfg.spec;
  bool have_name = false;
  for (const auto& [key, value] : kv) {
    if (key == "name") {
      spec.name = value;
      have_name = true;
    } else if (key == "stages") {
      spec.stages = static_cast<int>(text::parse_int(value, "stages"));
    } else if (key == "order") {
      spec.order = static_cast<int>(text::parse_int(value, "order"));
    } else if (key == "shape") {
      if (value == "rectangle") spec.region.shape = RegionShape::rectangle;
      else if (value == "sector") spec.region.shape = RegionShape::sector;
      else throw ParseError("shape must be 'rectangle' or 'sector'");
    } else if (key == "eta") {
      spec.region.eta = text::parse_scalar(value, "eta");
    } else if (key == "alpha1") {
      spec.region.alpha1 = text::parse_scalar(value, "alpha1");
    } else if (key == "alpha2") {
      spec.region.alpha2 = text::parse_scalar(value, "alpha2");
    } else if (key == "beta1") {
      spec.region.beta1 = text::parse_scalar(value, "beta1");
    } else if (key == "beta2") {
      spec.region.beta2 = text::parse_scalar(value, "beta2");
    } else if (key == "stability_floor") {
      spec.stability_floor = text::parse_scalar(value, "stability_floor");
    } else if (key == "metric") {
      if (value == "e") spec.metric = MetricKind::e_amplification;
      else if (value == "E") spec.metric = MetricKind::E_frequency;
      else throw ParseError("metric must be 'e' or 'E'");
    } else if (key == "quadrature") {
      const auto x = value.find('x');
      if (x == std::string::npos) throw ParseError("quadrature must look like 64x64");
      spec.quadrature.n1 = static_cast<int>(text::parse_int(value.substr(0, x), "quadrature"));
      spec.quadrature.n2 = static_cast<int>(text::parse_int(value.substr(x + 1), "quadrature"));
    } else if (key == "restarts") {
      spec.restarts = static_cast<int>(text::parse_int(value, "restarts"));
    } else if (key == "seed") {
      cfg.seed = value;
    } else {
      throw ParseError("unknown optimization key '" + key + "'");
    }
  }
  if (!have_name) spec.name = "Opt" + std::to_string(spec.stages);
  spec.validate();
  return cfg;
}

std::string format_result(const OptimizationSpec& spec, const OptimizationResult& result) {
  using text::format_double;
  const auto& r = spec.region;
  std::ostringstream os;
  os << "# optimized: stages=" << spec.stages << " order=" << spec.order;
  if (r.shape == RegionShape::rectangle) {
    os << " shape=rectangle eta=" << format_double(r.eta) << " alpha1=" << format_double(r.alpha1)
       << " alpha2=" << format_double(r.alpha2);
  } else {
    os << " shape=sector eta=" << format_double(r.eta) << " beta1=" << format_double(r.beta1)
       << " beta2=" << format_double(r.beta2);
  }
  os << "\n#   metric=" << (spec.metric == MetricKind::e_amplification ? "e" : "E")
     << " stability_floor=" << format_double(spec.stability_floor) << " quadrature=" << spec.quadrature.n1
     << "x" << spec.quadrature.n2 << " restarts=" << spec.restarts << "\n";
  os << "#   metric_value=" << format_double(result.metric_value)
     << " growth_sign=" << format_double(result.constraints.growth_sign)
     << " eta_s=" << format_double(result.constraints.eta_s_achieved) << " iterations=" << result.iterations
     << " converged=" << (result.converged ? "yes" : "no") << "\n";
  os << format_scheme(result.scheme);
  return os.str();
}

}  // namespace rkwave
