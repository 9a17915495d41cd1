#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "rkwave/errors.hpp"
#include "rkwave/schemes.hpp"
#include "rkwave/wave1d.hpp"

using namespace rkwave;

namespace {

constexpr double kPi = std::numbers::pi;

const SchemeRegistry& registry() {
  static const SchemeRegistry r = builtin_registry();
  return r;
}

const StencilLibrary& library() {
  static const StencilLibrary l = builtin_stencils();
  return l;
}

const Stencil& stencil(std::string_view name) { return library().stencil(name); }

FilterSpec filter(std::string_view name, double strength) {
  FilterSpec f = library().filter(name);
  f.strength = strength;
  return f;
}

std::vector<double> sampled(int n, double dx, auto fn) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = fn(i * dx);
  return u;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Solves sum_j 2 j^(2k-1) d_j = [k == 1], k = 1..w, exactly.
std::vector<double> vandermonde_stencil(int w) {
  using boost::multiprecision::cpp_rational;
  std::vector<std::vector<cpp_rational>> a(static_cast<std::size_t>(w), std::vector<cpp_rational>(w + 1));
  for (int k = 1; k <= w; ++k) {
    for (int j = 1; j <= w; ++j) {
      cpp_rational pw = 2;
      for (int e = 0; e < 2 * k - 1; ++e) pw *= j;
      a[k - 1][j - 1] = pw;
    }
    a[k - 1][w] = k == 1 ? 1 : 0;
  }
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < w; ++r) {
      if (r == c) continue;
      const cpp_rational f = a[r][c] / a[c][c];
      for (int k = c; k <= w; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> d;
  for (int j = 0; j < w; ++j) d.push_back(static_cast<double>(a[j][w] / a[j][j]));
  return d;
}

// (2k)-th derivative of D at theta0 = 0 or pi, relative to the size of its terms.
double even_derivative(const FilterSpec& f, int k, bool at_pi) {
  long double sum = k == 0 ? f.f[0] : 0.0L;
  long double scale = std::abs(sum);
  for (int j = 1; j <= f.halfwidth(); ++j) {
    long double t = 2.0L * f.f[j] * std::pow(static_cast<long double>(j), 2 * k);
    if (at_pi && j % 2 == 1) t = -t;
    sum += t;
    scale += std::abs(t);
  }
  return static_cast<double>(sum / scale);
}

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Maximally flat transfer function written directly in u = sin^2(theta/2).
double flat_transfer(int n, int m, double theta) {
  const double u = std::pow(std::sin(theta / 2), 2);
  double tail = 0;
  for (int k = 0; k < m; ++k) tail += binom(n - 1 + k, k) * std::pow(1 - u, k);
  return std::pow(u, n) * tail;
}

struct ModeRun {
  WaveState state;
  std::vector<double> k;
};

// p = v = cos(kappa x) on a zero-damping grid.
ModeRun cosine_mode(int n, double dx, double kappa) {
  ModeRun m;
  m.state.p = sampled(n, dx, [&](double x) { return std::cos(kappa * x); });
  m.state.v = m.state.p;
  m.k.assign(static_cast<std::size_t>(n), 0.0);
  return m;
}

std::vector<double> integrate_to(const WaveProblem& pb, const Scheme& s, double dt, const Stencil& st,
                                 const FilterSpec* f) {
  dt = snap_dt(s, pb.final_time, dt);
  WaveState state = initial_state(pb);
  std::vector<double> k(static_cast<std::size_t>(pb.points()));
  for (int i = 0; i < pb.points(); ++i) k[static_cast<std::size_t>(i)] = pb.damping(pb.x(i));
  Stepper stepper(s, st, f, k, pb.dx());
  const long steps = std::lround(pb.final_time / dt);
  for (long i = 0; i < steps; i += stepper.substeps()) stepper.step(state, dt);
  return state.p;
}

}  // namespace

TEST_CASE("maximal stencils solve their order conditions") {
  for (int w = 1; w <= 10; ++w) {
    const Stencil s = maximal_stencil(w);
    CHECK(s.name == "central" + std::to_string(2 * w + 1));
    CHECK(s.order == 2 * w);
    const auto oracle = vandermonde_stencil(w);
    for (int j = 0; j < w; ++j) CHECK(s.d[j] == doctest::Approx(oracle[j]).epsilon(1e-12));
  }
  const Stencil s = maximal_stencil(2);
  CHECK(s.d[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.d[1] == doctest::Approx(-1.0 / 12.0).epsilon(1e-15));
  CHECK_THROWS_AS(maximal_stencil(0), ValidationError);
}

TEST_CASE("maximal stencils differentiate polynomials up to degree 2w exactly") {
  for (int w : {1, 3, 7}) {
    const Stencil s = maximal_stencil(w);
    for (int deg = 0; deg <= 2 * w; ++deg) {
      // Derivative of x^deg at x = 0.3 with dx = 0.1, evaluated on the stencil.
      const double x0 = 0.3;
      const double dx = 0.1;
      double approx = 0;
      for (int j = 1; j <= w; ++j) {
        approx += s.d[j - 1] * (std::pow(x0 + j * dx, deg) - std::pow(x0 - j * dx, deg));
      }
      approx /= dx;
      const double exact = deg == 0 ? 0.0 : deg * std::pow(x0, deg - 1);
      CHECK(approx == doctest::Approx(exact).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("DRP stencil is consistent and fourth order") {
  const Stencil& drp = stencil("drp7");
  CHECK(drp.family == StencilFamily::drp);
  CHECK(drp.halfwidth() == 3);
  double first = 0, third = 0;
  for (int j = 1; j <= 3; ++j) {
    first += 2 * j * drp.d[j - 1];
    third += j * j * j * drp.d[j - 1];
  }
  CHECK(first == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(std::abs(third) < 1e-10);
}

TEST_CASE("standard filters") {
  const FilterSpec f6 = standard_filter(6);
  CHECK(f6.name == "F6");
  REQUIRE(f6.halfwidth() == 3);
  const double expect[] = {20.0 / 64, -15.0 / 64, 6.0 / 64, -1.0 / 64};
  for (int j = 0; j <= 3; ++j) CHECK(f6.f[j] == expect[j]);

  const FilterSpec f164 = standard_filter(16, 4);
  CHECK(f164.name == "F16_4");
  CHECK(f164.halfwidth() == 9);
  CHECK(f164.order == 16);

  for (auto [n, m] : {std::pair{1, 1}, {3, 1}, {8, 1}, {8, 2}, {4, 3}}) {
    const FilterSpec f = standard_filter(2 * n, 2 * m);
    CHECK(f.halfwidth() == n + m - 1);
    for (double theta = 0; theta <= kPi; theta += 0.05) {
      CHECK(f.transfer(theta) == doctest::Approx(flat_transfer(n, m, theta)).epsilon(1e-13).scale(1.0));
      CHECK(f.transfer(theta) >= -1e-15);
      CHECK(f.transfer(theta) <= 1 + 1e-15);
    }
    CHECK(std::abs(f.transfer(0)) < 1e-15);
    CHECK(f.transfer(kPi) == doctest::Approx(1.0).epsilon(1e-14));
    // D vanishes to order 2n at 0 and 1 - D to order 2m at pi.
    for (int k = 0; k < n; ++k) CHECK(std::abs(even_derivative(f, k, false)) < 1e-15);
    CHECK(std::abs(even_derivative(f, n, false)) > 1e-6);
    for (int k = 1; k < m; ++k) CHECK(std::abs(even_derivative(f, k, true)) < 1e-15);
    CHECK(std::abs(even_derivative(f, m, true)) > 1e-6);
  }
  CHECK_THROWS_AS(standard_filter(5), ValidationError);
  CHECK_THROWS_AS(standard_filter(0), ValidationError);
}

TEST_CASE("builtin stencil library") {
  CHECK(stencil("central15").halfwidth() == 7);
  CHECK(library().filter("F16_4").halfwidth() == 9);
  CHECK(library().filter("F6").strength == 1.0);
  CHECK_THROWS_AS(stencil("nope"), ValidationError);
  CHECK_THROWS_AS(library().filter("nope"), ValidationError);
}

TEST_CASE("stencil file parsing") {
  const auto lib = parse_stencils(
      "# comment\n"
      "stencil c3 halfwidth=1 order=2\n"
      "d 1 0.5\n"
      "end\n"
      "filter box halfwidth=1 order=2\n"
      "f 0 0.5\n"
      "f 1 -0.25\n"
      "end\n");
  REQUIRE(lib.stencils.size() == 1);
  CHECK(lib.stencils[0].d == std::vector<double>{0.5});
  CHECK(lib.stencils[0].family == StencilFamily::custom);
  REQUIRE(lib.filters.size() == 1);
  CHECK(lib.filters[0].transfer(kPi) == doctest::Approx(1.0));
  CHECK(lib.filters[0].name == "box");

  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1 order=2\nd 1 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=2 order=2\nd 1 0.5\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1\nd 1 0.5\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1 order=2 x=1\nd 1 0.5\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1 order=2\nd 1 0.4\nend\n"), ValidationError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1 order=2\nd 1 0.5\nd 1 0.5\nend\n"), ParseError);
  CHECK_THROWS_AS(parse_stencils("stencil a halfwidth=1 order=2\nd 1 0.5\nend\n"
                                 "stencil a halfwidth=1 order=2\nd 1 0.5\nend\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_stencils("bogus\n"), ParseError);
}

TEST_CASE("spatial derivative") {
  const double dx = 1.0 / 32;
  const int n = 96;
  const auto zero = spatial_derivative(std::vector<double>(n, 3.5), stencil("central15"), dx);
  for (double v : zero) CHECK(v == 0.0);

  const auto u = sampled(n, dx, [](double x) { return std::sin(2 * kPi * x); });
  const auto du = spatial_derivative(u, stencil("central15"), dx);
  const auto exact = sampled(n, dx, [](double x) { return 2 * kPi * std::cos(2 * kPi * x); });
  CHECK(max_abs_diff(du, exact) < 1e-10);

  // DRP at 8 PPW: the derivative of a sine is the modified wavenumber times a cosine.
  const double dx8 = 1.0 / 8;
  const auto u8 = sampled(64, dx8, [](double x) { return std::sin(2 * kPi * x); });
  const auto du8 = spatial_derivative(u8, stencil("drp7"), dx8);
  const double kbar = stencil("drp7").modified_wavenumber(2 * kPi * dx8) / dx8;
  const auto pred = sampled(64, dx8, [&](double x) { return kbar * std::cos(2 * kPi * x); });
  CHECK(max_abs_diff(du8, pred) / kbar < 1e-8);

  CHECK_THROWS_AS(spatial_derivative(std::vector<double>(14, 0.0), stencil("central15"), dx), SizeError);
}

TEST_CASE("filter application") {
  const int n = 48;
  const FilterSpec f6 = filter("F6", 1.0);
  const auto flat = apply_filter(std::vector<double>(n, 2.0), f6);
  for (double v : flat) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));

  std::vector<double> saw(n);
  for (int i = 0; i < n; ++i) saw[i] = i % 2 == 0 ? 1.0 : -1.0;
  for (double v : apply_filter(saw, f6)) CHECK(std::abs(v) < 1e-15);
  const auto part = apply_filter(saw, filter("F16_4", 0.2));
  for (int i = 0; i < n; ++i) CHECK(part[i] == doctest::Approx(0.8 * saw[i]).epsilon(1e-14));

  const double dx = 1.0 / 24;
  const auto u = sampled(n, dx, [](double x) { return std::sin(2 * kPi * x); });
  const auto fu = apply_filter(u, f6);
  const double theta = 2 * kPi * dx;
  // D(theta) = sum f_j (1 - cos j theta) form, with the zero-sum of the coefficients.
  double D = 0;
  for (int j = 1; j <= 3; ++j) D -= 2 * f6.f[j] * (1 - std::cos(j * theta));
  for (int i = 0; i < n; ++i) CHECK(std::abs(fu[i] - (1 - D) * u[i]) < 1e-15);
  CHECK(D == doctest::Approx(std::pow(std::sin(theta / 2), 6)).epsilon(1e-9));
  CHECK(D < 1e-5);

  CHECK_THROWS_AS(apply_filter(std::vector<double>(6, 0.0), f6), SizeError);
}

TEST_CASE("semi-discrete right-hand side") {
  const int n = 64;
  const double dx = 1.0 / 32;
  const std::vector<double> k0(n, 0.0);
  const WaveState zero{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const auto r0 = rhs(zero, stencil("central7"), k0, dx);
  for (double v : r0.p) CHECK(v == 0.0);

  const auto s = sampled(n, dx, [](double x) { return std::sin(2 * kPi * x); });
  const auto r = rhs({s, s}, stencil("central15"), k0, dx);
  const auto expect = sampled(n, dx, [](double x) { return -2 * kPi * std::cos(2 * kPi * x); });
  CHECK(max_abs_diff(r.p, expect) < 1e-10);

  const auto k = sampled(n, dx, [](double x) { return 1 + std::cos(4 * kPi * x); });
  const auto g = sampled(n, dx, [](double x) { return std::exp(std::sin(2 * kPi * x)); });
  const auto rg = rhs({g, g}, stencil("drp7"), k, dx);
  CHECK(rg.p == rg.v);
  CHECK_THROWS_AS(rhs({g, g}, stencil("drp7"), std::vector<double>(10, 0.0), dx), SizeError);
}

TEST_CASE("one step on a Fourier mode multiplies it by the amplification factor") {
  const int n = 48;
  const double dx = 1.0 / 24;
  const double kappa = 2 * kPi * 3 / (n * dx);
  const double dt = 0.9 * dx;
  for (const char* stname : {"central7", "drp7", "central15"}) {
    const Stencil& st = stencil(stname);
    const double z = st.modified_wavenumber(kappa * dx) / dx * dt;
    for (const auto& s : registry().all()) {
      ModeRun m = cosine_mode(n, dx, kappa);
      Stepper stepper(s, st, nullptr, m.k, dx);
      stepper.step(m.state, dt);
      cplx r;
      if (auto* rk = std::get_if<RKScheme>(&s)) r = amplification(*rk, z);
      else if (auto* cs = std::get_if<CompositeScheme>(&s)) r = composite_amplification(*cs, z);
      else r = std::exp(cplx(0, -z));
      const auto expect = sampled(n, dx, [&](double x) { return (r * std::exp(cplx(0, kappa * x))).real(); });
      INFO(scheme_name(s), " ", stname);
      CHECK(max_abs_diff(m.state.p, expect) < 1e-12);
      CHECK(m.state.p == m.state.v);
    }
  }
}

TEST_CASE("schemes with a zero coefficient use the power form") {
  const RKScheme gap("gap", 2, {1.0, 0.5, 0.0, 0.01});
  CHECK_THROWS_AS(coeffs_to_betas(gap), ZeroCoefficient);
  const int n = 48;
  const double dx = 1.0 / 24;
  const double kappa = 2 * kPi * 2 / (n * dx);
  ModeRun m = cosine_mode(n, dx, kappa);
  Stepper stepper(gap, stencil("central7"), nullptr, m.k, dx);
  stepper.step(m.state, 0.5 * dx);
  const double z = stencil("central7").modified_wavenumber(kappa * dx) * 0.5;
  const cplx r = amplification(gap, z);
  const auto expect = sampled(n, dx, [&](double x) { return (r * std::exp(cplx(0, kappa * x))).real(); });
  CHECK(max_abs_diff(m.state.p, expect) < 1e-13);
}

TEST_CASE("filtered step multiplies a mode by (1 - sigma D)") {
  const int n = 48;
  const double dx = 1.0 / 16;
  const double kappa = 2 * kPi * 5 / (n * dx);
  const FilterSpec f = filter("F6", 0.3);
  ModeRun m = cosine_mode(n, dx, kappa);
  const RKScheme& rk4 = std::get<RKScheme>(registry().get("RK4"));
  Stepper stepper(rk4, stencil("central7"), &f, m.k, dx);
  stepper.step(m.state, 0.7 * dx);
  const double z = stencil("central7").modified_wavenumber(kappa * dx) * 0.7;
  const cplx r = amplification(rk4, z) * (1 - 0.3 * f.transfer(kappa * dx));
  const auto expect = sampled(n, dx, [&](double x) { return (r * std::exp(cplx(0, kappa * x))).real(); });
  CHECK(max_abs_diff(m.state.p, expect) < 1e-13);
}

TEST_CASE("zero state stays zero") {
  const int n = 32;
  WaveState s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const FilterSpec f = filter("F6", 1.0);
  Stepper stepper(registry().get("LDDRK56"), stencil("central7"), &f, std::vector<double>(n, 1.0), 0.1);
  stepper.step(s, 0.05);
  for (double v : s.p) CHECK(v == 0.0);
  CHECK(stepper.substeps() == 2);
}

TEST_CASE("p - v stays zero with damping and filtering") {
  WaveProblem pb;
  pb.ppw = 16;
  WaveState state = initial_state(pb);
  std::vector<double> k(static_cast<std::size_t>(pb.points()));
  for (int i = 0; i < pb.points(); ++i) k[i] = pb.damping(pb.x(i));
  const FilterSpec f = filter("F6", 0.2);
  for (const char* name : {"RK4", "LDDRK46", "Opt12"}) {
    WaveState s = state;
    Stepper stepper(registry().get(name), stencil("central7"), &f, k, pb.dx());
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      stepper.step(s, 0.8 * pb.dx());
      double pn = 0;
      for (std::size_t j = 0; j < s.p.size(); ++j) {
        pn = std::max(pn, std::abs(s.p[j]));
        worst = std::max(worst, std::abs(s.p[j] - s.v[j]));
      }
      worst /= pn;
    }
    CHECK(worst <= 1e-13);
  }
}

TEST_CASE("damping profile and its antiderivative") {
  for (int power : {1, 3}) {
    WaveProblem pb;
    pb.damping_power = power;
    // Composite Simpson on [10, 16].
    const int m = 6000;
    const double a = 10, b = 16, h = (b - a) / m;
    double s = pb.damping(a) + pb.damping(b);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * pb.damping(a + i * h);
    s *= h / 3;
    CHECK(s == doctest::Approx(6.0).epsilon(1e-10));
    for (double x : {12.3, 13.0, 13.71}) {
      double t = 0;
      const double hh = (x - 12.0) / m;
      t = pb.damping(12.0) + pb.damping(x);
      for (int i = 1; i < m; ++i) t += (i % 2 ? 4 : 2) * pb.damping(12.0 + i * hh);
      t *= hh / 3;
      CHECK(pb.damping_antiderivative(x) == doctest::Approx(t).epsilon(1e-10));
    }
    CHECK(pb.damping_antiderivative(5.0) == 0.0);
    CHECK(pb.damping_antiderivative(20.0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(pb.damping_antiderivative(44.0) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(pb.damping_antiderivative(-4.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
  CHECK(WaveProblem{}.damping(13.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(WaveProblem{}.damping(37.0) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("problem validation") {
  WaveProblem pb;
  CHECK_NOTHROW(pb.validate());
  CHECK(pb.points() == 576);
  pb.ppw = 0;
  CHECK_THROWS_AS(pb.validate(), ValidationError);
  pb = {};
  pb.length = 24.5;
  pb.ppw = 3;
  CHECK_THROWS_AS(pb.validate(), ValidationError);
  pb = {};
  pb.damping_start = 23;
  CHECK_THROWS_AS(pb.validate(), ValidationError);
  pb = {};
  pb.damping_power = 0;
  CHECK_THROWS_AS(pb.validate(), ValidationError);
}

TEST_CASE("analytic solution") {
  WaveProblem pb;
  pb.ppw = 8;
  const auto init = initial_state(pb);
  const auto at0 = analytic_solution(pb, 0.0);
  CHECK(at0.p == init.p);
  CHECK(at0.v == init.v);
  CHECK(init.p[48] == doctest::Approx(1.0));

  WaveProblem free = pb;
  free.damping_integral = 0;
  const auto lap = analytic_solution(free, free.length);
  CHECK(max_abs_diff(lap.p, init.p) < 1e-14);

  // x = 20 at t = 10 started at x = 10: the whole damping region lies in between.
  const auto s = analytic_solution(pb, 10.0);
  const int i = 20 * pb.ppw;
  CHECK(std::abs(s.p[i] / pb.initial(10.0) - std::exp(-6.0)) <= 1e-12);
  CHECK(s.p == s.v);

  CHECK_THROWS_AS(analytic_solution(pb, -1.0), UnsupportedProblem);
}

TEST_CASE("time step snapping") {
  const Scheme& rk4 = registry().get("RK4");
  const Scheme& l46 = registry().get("LDDRK46");
  CHECK(snap_dt(rk4, 24, 0.1) == 0.1);
  CHECK(snap_dt(rk4, 24, 0.099) == 24.0 / 242);
  CHECK(snap_dt(rk4, 24, 100) == 24.0);
  CHECK(snap_dt(l46, 24, 24.0 / 241) == 24.0 / 242);
  CHECK(snap_dt(l46, 24, 100) == 12.0);
  CHECK_THROWS_AS(snap_dt(rk4, 24, 0.0), ValidationError);
}

TEST_CASE("benchmark result bookkeeping") {
  WaveProblem pb;
  pb.ppw = 8;
  const FilterSpec f = filter("F6", 0.2);
  const auto r = run_benchmark(pb, registry().get("LDDRK56"), 0.1, stencil("drp7"), &f);
  CHECK(r.scheme == "LDDRK56");
  CHECK(r.dt == 0.1);
  CHECK(r.cfl == pb.ppw * r.dt);
  CHECK(r.effort == 5.5 * 3 * 240 * 192);
  CHECK(r.stable);
  CHECK(r.error > 0.05);
  CHECK(r.error < 1.0);

  const auto bad = run_benchmark(pb, registry().get("RK4"), 4.0 / pb.ppw, stencil("central7"), &f);
  CHECK(std::isinf(bad.error));
  CHECK_FALSE(bad.stable);
}

TEST_CASE("dispersion error with no damping or filter decreases with resolution") {
  double prev = 1;
  for (int ppw : {16, 24, 32}) {
    WaveProblem pb;
    pb.ppw = ppw;
    pb.damping_integral = 0;
    const double e = run_benchmark(pb, ExactScheme{}, pb.dx(), stencil("central7"), nullptr).error;
    CHECK(e < prev);
    prev = e;
    // Small-dt RK12 reaches the same level.
    const double e12 = run_benchmark(pb, registry().get("RK12"), 0.5 * pb.dx(), stencil("central7"), nullptr).error;
    CHECK(e12 == doctest::Approx(e).epsilon(1e-6));
  }
}

TEST_CASE("RK4 time error converges at fourth order") {
  WaveProblem pb;
  pb.ppw = 24;
  const FilterSpec f = filter("F6", 0.2);
  const Stencil& st = stencil("central7");
  std::vector<double> cfl, err;
  for (double c : {0.8, 0.6, 0.4, 0.3}) {
    const double dt = c * pb.dx();
    const auto a = integrate_to(pb, registry().get("RK4"), dt, st, &f);
    const auto b = integrate_to(pb, ExactScheme{}, dt, st, &f);
    cfl.push_back(c);
    err.push_back(max_abs_diff(a, b));
  }
  const double slope = std::log(err.front() / err.back()) / std::log(cfl.front() / cfl.back());
  CHECK(slope == doctest::Approx(4.0).epsilon(0.3 / 4));
}

TEST_CASE("sweep ordering and parallel equivalence") {
  WaveProblem pb;
  pb.ppw = 8;
  const FilterSpec f = filter("F6", 0.2);
  const std::vector<Scheme> schemes{registry().get("RK4"), registry().get("LDDRK46")};
  const std::vector<double> dts{0.05, 0.2, 0.1};
  const auto par = sweep(pb, schemes, dts, stencil("drp7"), &f);
  const auto ser = sweep_serial(pb, schemes, dts, stencil("drp7"), &f);
  REQUIRE(par.size() == 6);
  CHECK(to_csv(par) == to_csv(ser));
  CHECK(par[0].scheme == "RK4");
  CHECK(par[0].dt == 0.2);
  CHECK(par[2].dt == 0.05);
  CHECK(par[3].scheme == "LDDRK46");
  CHECK(to_csv(par).rfind("scheme,dt,cfl,error,effort,stable\nRK4,0.2,1.6,", 0) == 0);

  const auto none = sweep(pb, schemes, std::vector<double>{}, stencil("drp7"), &f);
  CHECK(none.empty());
  CHECK(to_csv(none) == "scheme,dt,cfl,error,effort,stable\n");
  CHECK_THROWS_AS(sweep(pb, schemes, std::vector<double>{-1.0}, stencil("drp7"), &f), ValidationError);
}

TEST_CASE("bench config parsing") {
  const auto cfg = parse_bench_config(
      "name = c7_sweep\n"
      "ppw = 24\n"
      "stencil = central7\n"
      "filter = F6\n"
      "filter_strength = 0.5\n"
      "schemes = RK4, LDDRK46\n"
      "cfl_range = 4, 0.25, 5\n"
      "damping_power = 2\n");
  CHECK(cfg.name == "c7_sweep");
  CHECK(cfg.problem.ppw == 24);
  CHECK(cfg.problem.damping_power == 2);
  CHECK(cfg.filter_strength == 0.5);
  CHECK(cfg.schemes == std::vector<std::string>{"RK4", "LDDRK46"});
  REQUIRE(cfg.cfls.size() == 5);
  CHECK(cfg.cfls[0] == 4.0);
  CHECK(cfg.cfls[2] == doctest::Approx(1.0));
  CHECK(cfg.cfls[4] == doctest::Approx(0.25));
  CHECK(cfg.dts()[0] == doctest::Approx(4.0 / 24));

  const auto list = parse_bench_config("schemes = RK4\ncfl = 1, 0.5\n");
  CHECK(list.cfls == std::vector<double>{1.0, 0.5});
  CHECK(list.filter_strength == 0.2);

  CHECK_THROWS_AS(parse_bench_config("cfl = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_bench_config("schemes = RK4\nbogus = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_bench_config("schemes = RK4\ncfl = 1\ncfl_range = 2,1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_bench_config("schemes = RK4\nfilter_strength = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_bench_config("schemes = RK4\nppw = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_bench_config("schemes = RK4\ncfl = -1\n"), ValidationError);
}
