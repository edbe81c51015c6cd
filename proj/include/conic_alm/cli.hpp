#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conic_alm/alm.hpp"
#include "conic_alm/sdp_model.hpp"

// Command-line front end: `solve`, `verify` and `bench`.

namespace conic_alm::cli {

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,    ///< verify found counterexamples
  kNotConverged = 2,  ///< residual floor not reached
  kInputError = 3,
};

/// Instance source as given on the command line.
struct InstanceArgs {
  std::string builtin;  ///< example-d1, synth, maxcut-g1-20, maxcut-g2-20, maxcut-g3-20,
                        ///< svm-random, lasso-random, random-pair
  std::string sdpa;     ///< SDPA file (exclusive with builtin)
  int n = 5;
  int m = 6;
  int rank_x = 2;
  int d = 10;
  double lambda = 1.0;
  std::uint64_t seed = 1;
};

struct LoadedInstance {
  std::optional<SdpProblem> sdp;
  std::optional<KnownSolutionInstance> known;
  std::optional<IneqProblem> ineq;
  nlohmann::ordered_json descriptor;
};

/// Directory holding the Gset fixtures (compile-time default, overridable with
/// CONIC_ALM_DATA_DIR).
std::filesystem::path data_dir();

/// Throws std::invalid_argument for unknown names and SdpaError for bad files.
LoadedInstance load_instance(const InstanceArgs& args);

/// Runs the ALM of the given form from zero multipliers; distances are
/// recorded when the instance has a known solution.
AlmTrace solve_instance(const LoadedInstance& inst, AlmForm form, const AlmConfig& cfg);

/// One run per r with r fixed (no growth). Runs in parallel on at most
/// `threads` workers; results are in the order of `rs`.
std::vector<AlmTrace> bench_traces(const LoadedInstance& inst, AlmForm form, const AlmConfig& cfg,
                                   const std::vector<double>& rs, unsigned threads);

/// Worker cap: CONIC_ALM_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned bench_thread_cap();

/// Entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conic_alm::cli
