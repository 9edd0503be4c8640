#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pmog/synthetic.hpp"

namespace pmog::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Exit codes of pmog-bss.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  Eigen::Index q = 7;
  Eigen::Index p = 20;
  Eigen::Index n = 1000;
  Eigen::Index m_runs = 50;
  Eigen::Index R = 5;
  std::string mode = "pmog-orth";
  std::uint64_t seed = 42;
  double eps_rel = 1e-5;
  double eps_m = 1e-3;
  int max_restarts = 20;
  int restarts_per_source = 3;
  double duplicate_threshold = 0.98;
  SourceRanges ranges;
  std::string mixing = "random";  // demo-images: random | identity
  bool timing = false;

  std::filesystem::path out = ".";
  std::filesystem::path input;
  std::filesystem::path truth;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  std::vector<std::filesystem::path> images;
  std::string label_a = "fica";
  std::string label_b = "pmog";
};

void cmd_generate(const RunConfig& config);
/// Returns the process exit code: nonzero when extraction stopped early, in
/// which case the partial outputs are still written.
int cmd_extract(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_demo_images(const RunConfig& config);

/// Full command-line entry point; returns the exit code.
int run(int argc, const char* const* argv);

}  // namespace pmog::cli
