#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "nonloc/kernel.hpp"

namespace nonloc {

// Flat run configuration shared by the CLI commands; fields mirror the
// command-line flags and the key=value config file entries.
struct RunConfig {
  std::string command;
  int dim = 1;
  int n = 256;
  double delta0 = 0.25;
  std::string horizon = "constant";  // constant | gaussian_bump
  std::string profile = "inverse_s";
  int regularity_k = -1;
  int split_K = 0;
  double epsilon = 1e-8;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out;  // empty = stdout
  std::string rhs = "manufactured";  // manufactured | constant | file:<path>
  std::vector<int> sweep;  // n per axis for bench sweeps
  std::int64_t max_iter = 0;  // 0 = 10 * N
};

// Applies key=value lines (comments with '#', blank lines skipped) on top of
// the given base configuration.
RunConfig apply_config_file(RunConfig base, const std::string& path);

// One-line reproducibility record written as a CSV comment.
std::string config_comment(const RunConfig& cfg);

HorizonField horizon_from_config(const RunConfig& cfg);

// Kernel spec with the configured profile family.
KernelSpec spec_from_config(const RunConfig& cfg);

// Kernel spec with the profile forced to PolynomialTruncated(split_K).
KernelSpec truncated_spec_from_config(const RunConfig& cfg);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace nonloc
