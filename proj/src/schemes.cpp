#include "rkwave/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rkwave/errors.hpp"
#include "rkwave/text.hpp"

namespace rkwave {

namespace {

constexpr double kOrderTolValidate = 1e-12;
constexpr double kOrderTolDetect = 1e-10;
constexpr double kOrderTolHighRelative = 1e-6;
constexpr int kHighOrderFrom = 13;

bool satisfies_order_condition(double c, int j, double abs_tol) {
  if (j >= kHighOrderFrom) return std::abs(c / inv_factorial(j) - 1.0) <= kOrderTolHighRelative;
  return std::abs(c - inv_factorial(j)) <= abs_tol;
}

std::string line_prefix(const text::Line& line) {
  return "line " + std::to_string(line.number) + ": ";
}

}  // namespace

double inv_factorial(int j) {
  double f = 1.0;
  for (int k = 2; k <= j; ++k) f *= k;
  return 1.0 / f;
}

RKScheme::RKScheme(std::string name, int order, std::vector<double> coeffs)
    : name_(std::move(name)), order_(order), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ValidationError("scheme '" + name_ + "': no coefficients");
  if (order_ < 1 || order_ > stages()) {
    throw ValidationError("scheme '" + name_ + "': order " + std::to_string(order_) +
                          " outside [1, " + std::to_string(stages()) + "]");
  }
  for (int j = 1; j <= order_; ++j) {
    if (!satisfies_order_condition(c(j), j, kOrderTolValidate)) {
      throw ValidationError("scheme '" + name_ + "': c_" + std::to_string(j) + " = " +
                            text::format_double(c(j)) + " violates order " +
                            std::to_string(order_) + " (expected 1/" + std::to_string(j) + "!)");
    }
  }
  for (double cj : coeffs_) {
    if (!std::isfinite(cj)) throw ValidationError("scheme '" + name_ + "': non-finite coefficient");
  }
}

double RKScheme::c(int j) const {
  if (j < 1 || j > stages()) return 0.0;
  return coeffs_[static_cast<std::size_t>(j - 1)];
}

RKScheme maximal_order(int stages) {
  if (stages < 1) throw ValidationError("maximal order scheme needs at least one stage");
  std::vector<double> c(static_cast<std::size_t>(stages));
  for (int j = 1; j <= stages; ++j) c[static_cast<std::size_t>(j - 1)] = inv_factorial(j);
  return RKScheme("RK" + std::to_string(stages), stages, std::move(c));
}

cplx amplification(const RKScheme& scheme, cplx z) {
  const cplx w(z.imag(), -z.real());  // -i z
  const auto c = scheme.coeffs();
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = (acc + c[k]) * w;
  return 1.0 + acc;
}

cplx composite_amplification(const CompositeScheme& cs, cplx z) {
  return amplification(cs.first, z) * amplification(cs.second, z);
}

std::vector<double> betas_to_coeffs(const LowStorageCoeffs& ls) {
  const auto& b = ls.betas;
  const std::size_t p = b.size();
  std::vector<double> c(p);
  if (p == 0) return c;
  c[0] = b[p - 1];
  for (std::size_t j = 1; j < p; ++j) c[j] = b[p - 1 - j] * c[j - 1];
  return c;
}

LowStorageCoeffs coeffs_to_betas(const RKScheme& scheme) {
  const auto c = scheme.coeffs();
  const std::size_t p = c.size();
  LowStorageCoeffs ls;
  ls.betas.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (c[j] == 0.0) {
      throw ZeroCoefficient("scheme '" + scheme.name() + "': c_" + std::to_string(j + 1) +
                            " = 0 has no low-storage form");
    }
  }
  ls.betas[p - 1] = c[0];
  for (std::size_t j = 1; j < p; ++j) ls.betas[p - 1 - j] = c[j] / c[j - 1];
  return ls;
}

int order_of_accuracy(const RKScheme& scheme) {
  int q = 0;
  while (q < scheme.stages() && satisfies_order_condition(scheme.c(q + 1), q + 1, kOrderTolDetect)) {
    ++q;
  }
  return q;
}

RKScheme merged_double_step(const CompositeScheme& cs) {
  const int p1 = cs.first.stages();
  const int p2 = cs.second.stages();
  const int p = p1 + p2;
  std::vector<double> prod(static_cast<std::size_t>(p + 1), 0.0);
  for (int a = 0; a <= p1; ++a) {
    const double ca = a == 0 ? 1.0 : cs.first.c(a);
    for (int b = 0; b <= p2; ++b) {
      const double cb = b == 0 ? 1.0 : cs.second.c(b);
      prod[static_cast<std::size_t>(a + b)] += ca * cb;
    }
  }
  std::vector<double> c(static_cast<std::size_t>(p));
  for (int j = 1; j <= p; ++j) c[static_cast<std::size_t>(j - 1)] = std::ldexp(prod[j], -j);

  // Snap the satisfied order conditions so the defect is not polluted by
  // rounding residue of the convolution.
  int q = 0;
  while (q < p && satisfies_order_condition(c[static_cast<std::size_t>(q)], q + 1, kOrderTolDetect)) {
    c[static_cast<std::size_t>(q)] = inv_factorial(q + 1);
    ++q;
  }
  return RKScheme(cs.name + "(2dt)", std::max(q, 1), std::move(c));
}

const std::string& scheme_name(const Scheme& s) {
  return std::visit(
      [](const auto& v) -> const std::string& {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RKScheme>) return v.name();
        else return v.name;
      },
      s);
}

double stages_per_step(const Scheme& s) {
  if (auto* rk = std::get_if<RKScheme>(&s)) return rk->stages();
  if (auto* cs = std::get_if<CompositeScheme>(&s)) return 0.5 * cs->total_stages();
  return 0.0;
}

int application_stages(const Scheme& s) {
  if (auto* rk = std::get_if<RKScheme>(&s)) return rk->stages();
  if (auto* cs = std::get_if<CompositeScheme>(&s)) return cs->total_stages();
  return 0;
}

int declared_order(const Scheme& s) {
  if (auto* rk = std::get_if<RKScheme>(&s)) return rk->order();
  if (auto* cs = std::get_if<CompositeScheme>(&s)) return merged_double_step(*cs).order();
  return 0;
}

void SchemeRegistry::add(Scheme s) {
  if (find(scheme_name(s)) != nullptr) {
    throw ValidationError("duplicate scheme name '" + scheme_name(s) + "'");
  }
  schemes_.push_back(std::move(s));
}

const Scheme* SchemeRegistry::find(std::string_view name) const {
  for (const auto& s : schemes_) {
    if (scheme_name(s) == name) return &s;
  }
  return nullptr;
}

const Scheme& SchemeRegistry::get(std::string_view name) const {
  if (const Scheme* s = find(name)) return *s;
  throw UnknownScheme("unknown scheme '" + std::string(name) + "'");
}

std::vector<Scheme> parse_schemes(std::string_view content, const SchemeRegistry* known) {
  std::vector<Scheme> out;
  std::set<std::string> names;
  const auto lines = text::tokenize(content);

  auto lookup_rk = [&](const std::string& name, const text::Line& line) -> RKScheme {
    for (const auto& s : out) {
      if (scheme_name(s) == name) {
        if (auto* rk = std::get_if<RKScheme>(&s)) return *rk;
        throw ValidationError(line_prefix(line) + "composite member '" + name +
                              "' is not a single-step scheme");
      }
    }
    if (known != nullptr) {
      if (const Scheme* s = known->find(name)) {
        if (auto* rk = std::get_if<RKScheme>(s)) return *rk;
      }
    }
    throw ValidationError(line_prefix(line) + "unknown composite member '" + name + "'");
  };

  auto claim_name = [&](const std::string& name, const text::Line& line) {
    if (!names.insert(name).second) {
      throw ValidationError(line_prefix(line) + "duplicate scheme name '" + name + "'");
    }
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const std::string& kw = line.tokens[0];

    if (kw == "composite") {
      if (line.tokens.size() < 2) throw ParseError(line_prefix(line) + "composite needs a name");
      const std::string name = line.tokens[1];
      auto kv = text::key_values(line, 2);
      if (!kv.count("first") || !kv.count("second") || kv.size() != 2) {
        throw ParseError(line_prefix(line) + "composite needs exactly first=<name> second=<name>");
      }
      claim_name(name, line);
      out.emplace_back(CompositeScheme{name, lookup_rk(kv["first"], line), lookup_rk(kv["second"], line)});
      continue;
    }

    if (kw != "scheme") throw ParseError(line_prefix(line) + "unexpected '" + kw + "'");
    if (line.tokens.size() < 2) throw ParseError(line_prefix(line) + "scheme needs a name");
    const std::string name = line.tokens[1];
    auto kv = text::key_values(line, 2);
    if (!kv.count("stages") || !kv.count("order") || kv.size() != 2) {
      throw ParseError(line_prefix(line) + "scheme needs exactly stages=<p> order=<q>");
    }
    const long p = text::parse_int(kv["stages"], "stage count");
    const long q = text::parse_int(kv["order"], "order");
    if (p < 1 || p > 64) throw ParseError(line_prefix(line) + "stage count out of range");

    std::vector<std::optional<double>> given(static_cast<std::size_t>(p));
    bool terminated = false;
    for (++i; i < lines.size(); ++i) {
      const auto& body = lines[i];
      if (body.tokens[0] == "end" && body.tokens.size() == 1) {
        terminated = true;
        break;
      }
      if (body.tokens[0] != "c" || body.tokens.size() != 3) {
        throw ParseError(line_prefix(body) + "expected 'c <j> <decimal>' or 'end'");
      }
      const long j = text::parse_int(body.tokens[1], "coefficient index");
      if (j < 1 || j > p) throw ParseError(line_prefix(body) + "coefficient index out of range");
      auto& slot = given[static_cast<std::size_t>(j - 1)];
      if (slot) throw ParseError(line_prefix(body) + "coefficient c_" + std::to_string(j) + " repeated");
      slot = text::parse_double(body.tokens[2], "coefficient");
    }
    if (!terminated) throw ParseError(line_prefix(line) + "scheme '" + name + "' missing 'end'");

    std::vector<double> c(static_cast<std::size_t>(p));
    for (long j = 1; j <= p; ++j) {
      const auto& slot = given[static_cast<std::size_t>(j - 1)];
      if (j <= q) {
        // Implied by the order; an explicit value must agree with it.
        c[static_cast<std::size_t>(j - 1)] = inv_factorial(static_cast<int>(j));
        if (slot && !satisfies_order_condition(*slot, static_cast<int>(j), kOrderTolValidate)) {
          throw ValidationError(line_prefix(line) + "scheme '" + name + "' declares order " +
                                std::to_string(q) + " but c_" + std::to_string(j) + " = " +
                                text::format_double(*slot));
        }
      } else {
        if (!slot) {
          throw ParseError(line_prefix(line) + "scheme '" + name + "' is missing c_" + std::to_string(j));
        }
        c[static_cast<std::size_t>(j - 1)] = *slot;
      }
    }
    claim_name(name, line);
    out.emplace_back(RKScheme(name, static_cast<int>(q), std::move(c)));
  }
  return out;
}

std::vector<Scheme> registry_load(const std::string& path, const SchemeRegistry* known) {
  return parse_schemes(text::read_file(path), known);
}

std::string format_scheme(const RKScheme& scheme) {
  std::ostringstream os;
  os << "scheme " << scheme.name() << " stages=" << scheme.stages() << " order=" << scheme.order()
     << "\n";
  for (int j = scheme.order() + 1; j <= scheme.stages(); ++j) {
    os << "c " << j << " " << text::format_double(scheme.c(j)) << "\n";
  }
  os << "end\n";
  return os.str();
}

SchemeRegistry builtin_registry() {
  SchemeRegistry reg;
  for (int p = 1; p <= 16; ++p) reg.add(maximal_order(p));
  reg.add(ExactScheme{});
  for (auto& s : parse_schemes(bundled_scheme_text(), &reg)) reg.add(std::move(s));
  return reg;
}

}  // namespace rkwave
