#pragma once

// Command-line front end: inspect, map, limits, optimize, bench.
// Every command resolves and validates its inputs before writing anything.

#include <iosfwd>
#include <string>
#include <vector>

#include "rkwave/schemes.hpp"
#include "rkwave/spectral.hpp"
#include "rkwave/wave1d.hpp"

namespace rkwave::cli {

/// Builtin registry plus the schemes in `extra_file` (if non-empty).
SchemeRegistry load_registry(const std::string& extra_file);

/// "100x80" -> {100, 80}. Throws ParseError.
std::pair<int, int> parse_grid(const std::string& text);
/// "re0,re1,im0,im1"; entries may be pi expressions. Throws ParseError.
GridSpec parse_region(const std::string& text, std::pair<int, int> grid);
std::vector<double> parse_deltas(const std::string& text);

std::string cmd_inspect(const SchemeRegistry& reg, const std::vector<std::string>& names);

struct MapRequest {
  std::vector<std::string> schemes;
  GridSpec grid;
  ErrorKind kind = ErrorKind::phase;
  bool rescaled = false;
  std::string out_dir = ".";
};
/// One scheme: error map CSV + PGM. Several: winner map CSV + PPM. Returns
/// the written paths.
std::vector<std::string> cmd_map(const SchemeRegistry& reg, const MapRequest& req);

/// Rows per scheme: scheme, eta_s (lambda_s when rescaled), then eta_delta
/// and eta_hat_delta for each delta.
std::string cmd_limits(const SchemeRegistry& reg, const std::vector<std::string>& names,
                       const std::vector<double>& deltas, bool rescaled);

/// Runs the optimization described by the config file and appends the result
/// to `scheme_file`. Returns the report. Throws ValidationError for a name
/// already present in `reg` or in the file, Infeasible when no feasible point
/// is found.
std::string cmd_optimize(const std::string& config_path, const SchemeRegistry& reg, const std::string& scheme_file);

struct BenchOutcome {
  std::string csv_path;
  std::vector<BenchResult> results;
  double noise_floor = 0.0;
};
/// Runs the sweep and writes <out_dir>/bench_<name>.csv. Throws Diverged when
/// every cell fails.
BenchOutcome cmd_bench(const std::string& config_path, const SchemeRegistry& reg, const std::string& out_dir);

/// Parses arguments, dispatches, and maps errors to exit codes:
/// 0 success, 2 validation, 3 infeasible/diverged, 4 I/O.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rkwave::cli
