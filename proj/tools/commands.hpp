#pragma once

// Subcommand implementations behind the gpcycle executable. Each returns a
// process exit code: 0 success, 1 usage error, 2 data error, 3 numerical
// non-convergence.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpcycle/fitting.hpp"
#include "gpcycle/io.hpp"

namespace gpcycle::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kNonConvergence = 3 };

struct FitArgs {
  std::filesystem::path input;
  std::filesystem::path config;
  std::filesystem::path outdir;
  std::map<int, double> fixed_x_t;  ///< overrides any x_t given in the config
  FitOptions options;
};

struct CycleArgs {
  std::optional<std::filesystem::path> fits_dir;
  std::optional<std::filesystem::path> uv_csv;
  std::filesystem::path outdir;
};

struct SimulateArgs {
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double x0 = 0.0, y0 = 0.0;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t every = 1;  ///< write every k-th step (the last step is always written)
  std::filesystem::path outdir;
};

struct SampleArgs {
  double x_t = 0.0, eta = 0.0, b = 0.0, alpha = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int year = 0;
  double scale = 1.0;  ///< multiply draws by this currency amount
  std::filesystem::path outdir;
};

struct ReportArgs {
  double x_t = 0.0, eta = 0.0, b = 0.0, alpha = 0.0;
  double grid_max = 20.0;
  std::size_t grid_points = 401;
  std::filesystem::path outdir;
};

int cmd_fit(const FitArgs& args, const io::RunManifest& manifest);
int cmd_cycle(const CycleArgs& args, const io::RunManifest& manifest);
int cmd_simulate(const SimulateArgs& args, const io::RunManifest& manifest);
int cmd_sample(const SampleArgs& args, const io::RunManifest& manifest);
int cmd_report(const ReportArgs& args, const io::RunManifest& manifest);

/// Parses argv and dispatches; what the executable's main() calls.
int run(int argc, char** argv);

}  // namespace gpcycle::cli
