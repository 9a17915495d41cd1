#include "rkwave/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "rkwave/errors.hpp"
#include "rkwave/optimizer.hpp"
#include "rkwave/text.hpp"

namespace rkwave::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

const char* kind_name(ErrorKind k) { return k == ErrorKind::phase ? "phase" : "amp"; }

const char* stability_text(SmallStepStability s) {
  switch (s) {
    case SmallStepStability::stable:
      return "stable at small real ωΔt";
    case SmallStepStability::unstable:
      return "unstable at small real ωΔt";
    case SmallStepStability::marginal:
      return "marginal at small real ωΔt";
  }
  return "";
}

void describe_rk(std::ostringstream& os, const RKScheme& s, const std::string& indent) {
  os << indent << "stages " << s.stages() << "\n" << indent << "order " << s.order() << "\n";
  for (int j = 1; j <= s.stages(); ++j) os << indent << "c" << j << " " << text::format_double(s.c(j)) << "\n";
  try {
    const auto b = coeffs_to_betas(s).betas;
    for (std::size_t j = 0; j < b.size(); ++j) {
      os << indent << "beta" << j + 1 << " " << text::format_double(b[j]) << "\n";
    }
  } catch (const ZeroCoefficient&) {
    os << indent << "betas undefined (zero coefficient)\n";
  }
}

std::string resolve_relative(const std::string& path, const std::string& base_file) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  const fs::path base = fs::path(base_file).parent_path();
  const fs::path candidate = base / path;
  return fs::exists(candidate) ? candidate.string() : path;
}

}  // namespace

SchemeRegistry load_registry(const std::string& extra_file) {
  SchemeRegistry reg = builtin_registry();
  if (!extra_file.empty() && fs::exists(extra_file)) {
    for (auto& s : registry_load(extra_file, &reg)) reg.add(std::move(s));
  } else if (!extra_file.empty()) {
    throw IoError("cannot open '" + extra_file + "'");
  }
  return reg;
}

std::pair<int, int> parse_grid(const std::string& textv) {
  const auto x = textv.find('x');
  if (x == std::string::npos) throw ParseError("grid must look like <nx>x<ny>");
  const long nx = text::parse_int(textv.substr(0, x), "grid width");
  const long ny = text::parse_int(textv.substr(x + 1), "grid height");
  if (nx < 2 || ny < 2 || nx > 20000 || ny > 20000) throw GridError("grid needs 2..20000 points per axis");
  return {static_cast<int>(nx), static_cast<int>(ny)};
}

GridSpec parse_region(const std::string& textv, std::pair<int, int> grid) {
  const auto parts = text::split_list(textv);
  if (parts.size() != 4) throw ParseError("region must be re0,re1,im0,im1");
  GridSpec g;
  g.re_min = text::parse_scalar(parts[0], "re0");
  g.re_max = text::parse_scalar(parts[1], "re1");
  g.im_min = text::parse_scalar(parts[2], "im0");
  g.im_max = text::parse_scalar(parts[3], "im1");
  g.nx = grid.first;
  g.ny = grid.second;
  g.validate();
  return g;
}

std::vector<double> parse_deltas(const std::string& textv) {
  std::vector<double> out;
  for (const auto& item : text::split_list(textv)) {
    const double d = text::parse_double(item, "delta");
    if (!(d > 0) || !std::isfinite(d)) throw ValidationError("delta must be positive");
    out.push_back(d);
  }
  return out;
}

std::string cmd_inspect(const SchemeRegistry& reg, const std::vector<std::string>& names) {
  std::vector<const Scheme*> found;
  for (const auto& n : names) found.push_back(&reg.get(n));
  std::ostringstream os;
  for (const Scheme* s : found) {
    os << "scheme " << scheme_name(*s) << "\n";
    if (auto* rk = std::get_if<RKScheme>(s)) {
      describe_rk(os, *rk, "  ");
    } else if (auto* cs = std::get_if<CompositeScheme>(s)) {
      os << "  composite of " << cs->first.name() << " and " << cs->second.name() << "\n";
      os << "  order " << declared_order(*s) << " (double step)\n";
      os << "  first\n";
      describe_rk(os, cs->first, "    ");
      os << "  second\n";
      describe_rk(os, cs->second, "    ");
    } else {
      os << "  exact integrator r(z) = exp(-iz)\n";
    }
    os << "  " << stability_text(small_dt_stability_sign(*s)) << "\n";
    os << "  eta_s " << text::format_double(stability_limit(*s)) << "\n";
  }
  return os.str();
}

std::vector<std::string> cmd_map(const SchemeRegistry& reg, const MapRequest& req) {
  if (req.schemes.empty()) throw ValidationError("map needs at least one scheme");
  req.grid.validate();
  std::vector<Scheme> schemes;
  for (const auto& n : req.schemes) schemes.push_back(reg.get(n));

  const std::string suffix = std::string("_") + kind_name(req.kind) + "_" + std::to_string(req.grid.nx) + "x" +
                             std::to_string(req.grid.ny) + (req.rescaled ? "_rescaled" : "");
  std::vector<std::pair<std::string, std::string>> files;
  if (schemes.size() == 1) {
    const ErrorMap m = error_map(schemes[0], req.grid, req.kind, req.rescaled);
    const std::string stem = "map_" + req.schemes[0] + suffix;
    files.emplace_back(stem + ".csv", to_csv(m));
    files.emplace_back(stem + ".pgm", to_pgm(m));
  } else {
    const WinnerMap m = winner_map(schemes, req.grid, req.kind, req.rescaled);
    const std::string stem = "winner_" + join(req.schemes, "-") + suffix;
    files.emplace_back(stem + ".csv", to_csv(m));
    files.emplace_back(stem + ".ppm", to_ppm(m));
  }

  ensure_dir(req.out_dir);
  std::vector<std::string> written;
  for (const auto& [name, content] : files) {
    const std::string path = (fs::path(req.out_dir) / name).string();
    text::write_file_atomic(path, content);
    written.push_back(path);
  }
  return written;
}

std::string cmd_limits(const SchemeRegistry& reg, const std::vector<std::string>& names,
                       const std::vector<double>& deltas, bool rescaled) {
  std::vector<const Scheme*> schemes;
  if (names.empty()) {
    for (const auto& s : reg.all()) schemes.push_back(&s);
  } else {
    for (const auto& n : names) schemes.push_back(&reg.get(n));
  }
  for (double d : deltas) {
    if (!(d > 0)) throw ValidationError("delta must be positive");
  }
  const std::string sym = rescaled ? "lambda" : "eta";
  std::ostringstream os;
  os << "scheme," << sym << "_s";
  for (double d : deltas) {
    const std::string ds = text::format_double(d);
    os << "," << sym << "_" << ds << "," << sym << "_hat_" << ds;
  }
  os << "\n";
  for (const Scheme* s : schemes) {
    const LimitReport r = limit_report(*s, deltas, rescaled);
    os << scheme_name(*s) << "," << text::format_double(r.eta_s);
    for (double d : deltas) {
      os << "," << text::format_double(r.eta_delta.at(d)) << "," << text::format_double(r.eta_hat_delta.at(d));
    }
    os << "\n";
  }
  return os.str();
}

std::string cmd_optimize(const std::string& config_path, const SchemeRegistry& reg, const std::string& scheme_file) {
  const OptimizationConfig cfg = parse_optimization_config(text::read_file(config_path));
  cfg.spec.validate();
  if (reg.find(cfg.spec.name) != nullptr) {
    throw ValidationError("scheme '" + cfg.spec.name + "' already exists; choose another name");
  }
  std::string existing;
  if (fs::exists(scheme_file)) {
    existing = text::read_file(scheme_file);
    for (const auto& s : parse_schemes(existing, &reg)) {
      if (scheme_name(s) == cfg.spec.name) {
        throw ValidationError("scheme '" + cfg.spec.name + "' already exists in '" + scheme_file + "'");
      }
    }
  }
  const RKScheme seed = [&] {
    if (cfg.seed.empty()) return maximal_order(cfg.spec.stages);
    const Scheme& s = reg.get(cfg.seed);
    if (auto* rk = std::get_if<RKScheme>(&s)) return *rk;
    throw ValidationError("seed '" + cfg.seed + "' is not a single-step scheme");
  }();

  const OptimizationResult result = optimize(cfg.spec, seed);
  const std::string block = format_result(cfg.spec, result);

  const fs::path parent = fs::path(scheme_file).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  std::string content = existing;
  if (!content.empty() && content.back() != '\n') content += '\n';
  if (!content.empty()) content += '\n';
  text::write_file_atomic(scheme_file, content + block);

  std::ostringstream os;
  os << "optimized " << result.scheme.name() << " (" << result.scheme.stages() << " stages, order "
     << result.scheme.order() << ")\n";
  os << "metric " << text::format_double(result.metric_value) << "\n";
  os << "growth_sign " << text::format_double(result.constraints.growth_sign) << "\n";
  os << "eta_s " << text::format_double(result.constraints.eta_s_achieved) << "\n";
  os << "iterations " << result.iterations << (result.converged ? " (converged)" : " (not converged)") << "\n";
  os << "appended to " << scheme_file << "\n";
  os << block;
  return os.str();
}

BenchOutcome cmd_bench(const std::string& config_path, const SchemeRegistry& reg, const std::string& out_dir) {
  const BenchConfig cfg = parse_bench_config(text::read_file(config_path));
  StencilLibrary lib = builtin_stencils();
  if (!cfg.stencil_file.empty()) {
    auto extra = parse_stencils(text::read_file(resolve_relative(cfg.stencil_file, config_path)));
    for (auto& s : extra.stencils) lib.stencils.push_back(std::move(s));
    for (auto& f : extra.filters) lib.filters.push_back(std::move(f));
  }
  const Stencil& stencil = lib.stencil(cfg.stencil);
  std::optional<FilterSpec> filter;
  if (cfg.filter != "none") {
    filter = lib.filter(cfg.filter);
    filter->strength = cfg.filter_strength;
  }
  std::vector<Scheme> schemes;
  for (const auto& n : cfg.schemes) schemes.push_back(reg.get(n));
  for (char c : cfg.name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      throw ValidationError("bench name may only contain letters, digits, '_' and '-'");
    }
  }

  BenchOutcome out;
  const FilterSpec* fp = filter ? &*filter : nullptr;
  const auto dts = cfg.dts();
  out.results = sweep(cfg.problem, schemes, dts, stencil, fp);
  out.noise_floor = noise_floor(cfg.problem, stencil, fp);

  ensure_dir(out_dir);
  out.csv_path = (fs::path(out_dir) / ("bench_" + cfg.name + ".csv")).string();
  text::write_file_atomic(out.csv_path, to_csv(out.results));

  if (!out.results.empty() &&
      std::none_of(out.results.begin(), out.results.end(), [](const BenchResult& r) { return r.stable; })) {
    throw Diverged("every benchmark cell diverged; results written to " + out.csv_path);
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Runge-Kutta timestepping analysis for complex-frequency oscillations"};
  app.require_subcommand(1);
  std::string schemes_file;
  std::string out_dir = ".";
  app.add_option("--schemes", schemes_file, "extra scheme file");

  std::vector<std::string> names;
  auto* inspect = app.add_subcommand("inspect", "print coefficients, betas and small-dt stability");
  inspect->add_option("names", names, "scheme names")->required();

  std::string grid_text = "200x200";
  std::string region_text = "0,pi,-pi/2,pi/2";
  std::string kind_text = "phase";
  bool rescaled = false;
  auto* map = app.add_subcommand("map", "complex-plane error map or winner map");
  map->add_option("names", names, "scheme names (two or more: winner map)")->required();
  map->add_option("--out", out_dir, "output directory");
  map->add_option("--grid", grid_text, "<nx>x<ny>");
  map->add_option("--region", region_text, "re0,re1,im0,im1 (pi expressions allowed)");
  map->add_option("--kind", kind_text, "phase or amp")->check(CLI::IsMember({"phase", "amp"}));
  map->add_flag("--rescaled", rescaled, "cost-normalized (4-stage equivalent) errors");

  std::string delta_text = "1e-3,1e-4,1e-5";
  std::string limits_out;
  auto* limits = app.add_subcommand("limits", "stability and accuracy limit table (CSV)");
  limits->add_option("names", names, "scheme names (default: all)");
  limits->add_option("--delta", delta_text, "comma separated error levels");
  limits->add_flag("--rescaled", rescaled, "report rescaled lambda limits");
  limits->add_option("--out", limits_out, "output directory (default: print)");

  std::string config;
  std::string optimize_out;
  auto* opt = app.add_subcommand("optimize", "optimize free coefficients over a complex region");
  opt->add_option("--config", config, "optimization config")->required();
  opt->add_option("--out", optimize_out, "scheme file to append to (default: the --schemes file)");

  auto* bench = app.add_subcommand("bench", "1D damped-wave benchmark sweep");
  bench->add_option("--config", config, "benchmark config")->required();
  bench->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*opt) {
      // The result goes to a file, so extra schemes are loaded from it too.
      const std::string target = !optimize_out.empty() ? optimize_out
                                 : !schemes_file.empty() ? schemes_file
                                                         : "optimized.txt";
      const SchemeRegistry reg = load_registry(schemes_file == target ? "" : schemes_file);
      out << cmd_optimize(config, reg, target);
      return 0;
    }
    const SchemeRegistry reg = load_registry(schemes_file);
    if (*inspect) {
      out << cmd_inspect(reg, names);
    } else if (*map) {
      MapRequest req;
      req.schemes = names;
      req.grid = parse_region(region_text, parse_grid(grid_text));
      req.kind = kind_text == "phase" ? ErrorKind::phase : ErrorKind::amplification;
      req.rescaled = rescaled;
      req.out_dir = out_dir;
      for (const auto& p : cmd_map(reg, req)) out << "wrote " << p << "\n";
    } else if (*limits) {
      const std::string csv = cmd_limits(reg, names, parse_deltas(delta_text), rescaled);
      if (limits_out.empty()) {
        out << csv;
      } else {
        ensure_dir(limits_out);
        const std::string path =
            (fs::path(limits_out) / (rescaled ? "limits_rescaled.csv" : "limits.csv")).string();
        text::write_file_atomic(path, csv);
        out << "wrote " << path << "\n";
      }
    } else if (*bench) {
      const BenchOutcome r = cmd_bench(config, reg, out_dir);
      out << "wrote " << r.csv_path << "\n";
      out << "noise floor " << text::format_double(r.noise_floor) << "\n";
      std::size_t stable = 0;
      for (const auto& c : r.results) stable += c.stable ? 1 : 0;
      out << stable << " of " << r.results.size() << " cells stable\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace rkwave::cli
