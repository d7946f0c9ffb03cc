#pragma once

// Orchestration of command-line runs and the CSV artifacts they write.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace fctl {

inline constexpr const char* kToolVersion = "1.0.0";

enum class ExitCode : int {
  ok = 0,
  config_error = 1,
  instability = 2,
  numerics_failure = 3,
  compare_flagged = 4,
};

struct RunConfig {
  std::string mode;  // analyze-single | analyze-network | simulate-single |
                     // simulate-network | compare | roots | invert
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<long long> cycles;
  std::optional<long long> warmup_cycles;
  std::optional<int> replications;
  std::optional<double> epsilon_weight;
  /// Deviations above this many standard errors fail `compare`.
  double compare_sigmas = 4.0;
};

/// Runs one mode and writes its artifacts into out_dir. Errors are reported
/// on `log` and mapped to exit codes.
ExitCode run(const RunConfig& rc, std::ostream& log);

/// Lower-case, file-name-safe version of a queue name.
std::string file_stem(const std::string& name);

}  // namespace fctl
