#pragma once

#include "capax/run_config.hpp"

#include <string>
#include <vector>

namespace capax::cli {

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one mode; writes CSV/JSON artifacts under cfg.out_dir (every
/// output embeds the config hash) and a one-line summary to stdout.
/// Numerical and configuration failures are reported as exceptions by
/// run(); run_catching maps them to exit codes.
void run(const RunConfig& cfg);
int run_catching(const RunConfig& cfg);

/// Refinement study (mode = converge): one row per level with the value,
/// Richardson extrapolation and observed order.
struct ConvergenceRow {
  int level = 0;
  int n_nodes = 0;
  double value = 0.0;
  double richardson = 0.0;
  double observed_order = 0.0;
};
std::vector<ConvergenceRow> converge(const RunConfig& cfg);

}  // namespace capax::cli
