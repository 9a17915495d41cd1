#pragma once

// Explicit Runge-Kutta schemes described by their amplification polynomial
//
//   r(z) = 1 + sum_{j=1..p} c_j (-i z)^j,     z = omega * dt,
//
// which is all that matters for linear time-invariant problems.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rkwave {

using cplx = std::complex<double>;

/// 1/j! in double precision. Every order-condition comparison in the library
/// goes through this function so exact maximal-order coefficients compare
/// bit-equal.
double inv_factorial(int j);

/// A p-stage scheme of declared order q: c_1..c_p with c_j == 1/j! for j <= q.
class RKScheme {
 public:
  /// Throws ValidationError if `coeffs` is empty, order is outside [1, p], or
  /// the order conditions for `order` are violated.
  RKScheme(std::string name, int order, std::vector<double> coeffs);

  const std::string& name() const { return name_; }
  int stages() const { return static_cast<int>(coeffs_.size()); }
  int order() const { return order_; }
  std::span<const double> coeffs() const { return coeffs_; }
  /// 1-based c_j; zero for j > p.
  double c(int j) const;

  bool operator==(const RKScheme&) const = default;

 private:
  std::string name_;
  int order_;
  std::vector<double> coeffs_;
};

/// Two schemes applied on alternating steps; one application of the pair
/// advances the solution by 2 dt at a cost of p1 + p2 stages.
struct CompositeScheme {
  std::string name;
  RKScheme first;
  RKScheme second;

  int total_stages() const { return first.stages() + second.stages(); }
  bool operator==(const CompositeScheme&) const = default;
};

/// r(z) = exp(-i z); the "perfect" time integrator used as a reference.
struct ExactScheme {
  std::string name = "exact";
  bool operator==(const ExactScheme&) const = default;
};

using Scheme = std::variant<RKScheme, CompositeScheme, ExactScheme>;

/// beta_1..beta_p of the low-storage form
///   U(t+dt) = U + beta_p K_p,  K_{j+1} = dt F(U + beta_j K_j),  beta_0 = 0.
struct LowStorageCoeffs {
  std::vector<double> betas;
};

RKScheme maximal_order(int stages);

cplx amplification(const RKScheme& scheme, cplx z);
/// r1(z) r2(z): the factor applied over one double step of 2 dt.
cplx composite_amplification(const CompositeScheme& cs, cplx z);

std::vector<double> betas_to_coeffs(const LowStorageCoeffs& betas);
/// Throws ZeroCoefficient if some c_j == 0.
LowStorageCoeffs coeffs_to_betas(const RKScheme& scheme);

/// Largest q with c_j == 1/j! for all j <= q (|c_j - 1/j!| <= 1e-10, relaxed to
/// |c_j j! - 1| <= 1e-6 above j = 12).
int order_of_accuracy(const RKScheme& scheme);

/// The composite viewed as a single (p1+p2)-stage scheme with step 2 dt:
/// R(y) = r1(y/2) r2(y/2).
RKScheme merged_double_step(const CompositeScheme& cs);

const std::string& scheme_name(const Scheme& s);
/// Cost per dt in stage evaluations: p, (p1+p2)/2 for composites, 0 for exact.
double stages_per_step(const Scheme& s);
/// Stage count of one application (p or p1+p2); 0 for the exact scheme.
int application_stages(const Scheme& s);
/// Declared order; for composites the order of the merged double step.
int declared_order(const Scheme& s);

/// Named collection of schemes. Names are unique.
class SchemeRegistry {
 public:
  void add(Scheme s);
  const Scheme* find(std::string_view name) const;
  /// Throws UnknownScheme.
  const Scheme& get(std::string_view name) const;
  const std::vector<Scheme>& all() const { return schemes_; }
  std::size_t size() const { return schemes_.size(); }

 private:
  std::vector<Scheme> schemes_;
};

/// Parses the scheme-file grammar:
///
///   scheme <name> stages=<p> order=<q>
///   c <j> <decimal>          (coefficients above the order; lower ones implied)
///   end
///   composite <name> first=<name> second=<name>
///
/// Composite members may refer to earlier schemes in the same text or to
/// entries of `known`. Throws ParseError / ValidationError.
std::vector<Scheme> parse_schemes(std::string_view content, const SchemeRegistry* known = nullptr);
std::vector<Scheme> registry_load(const std::string& path, const SchemeRegistry* known = nullptr);

/// Serializes one scheme in the grammar accepted by parse_schemes.
std::string format_scheme(const RKScheme& scheme);

/// Text of the bundled scheme file (LDDRK family, Bogey-Bailly, Opt6/8/12).
std::string_view bundled_scheme_text();

/// RK1..RK16, the exact integrator, and the bundled schemes.
SchemeRegistry builtin_registry();

}  // namespace rkwave
