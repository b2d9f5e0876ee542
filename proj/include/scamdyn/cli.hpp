#pragma once

#include <iosfwd>

namespace scamdyn::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kSimulationError = 3,
  kDataError = 4,
  kInferenceError = 5,
};

/// Entry point of the `scamdyn` executable: simulate, stability, fit,
/// sensitivity, synthesize.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scamdyn::cli
