// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_RUNNER_HPP
#define ISAC_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>

#include "isac/config.hpp"

namespace isac {

/// Deliberate corruption hooks for exercising the verify suite's failure
/// path end to end.
enum class FaultInjection { None, NegateFilter };

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
    std::optional<std::filesystem::path> waveform_in; // reuse a design artifact
    FaultInjection fault = FaultInjection::None;
};

/// Exit codes shared by the library runners and the CLI.
namespace exit_code {
constexpr int ok = 0;
constexpr int config_error = 1;
constexpr int iteration_limit = 2;
constexpr int infeasible = 3;
constexpr int verify_failed = 4;
constexpr int audit_failed = 5;
constexpr int numerical_failure = 6;
}  // namespace exit_code

/// Designs one waveform and writes waveform.csv, filterbank.csv, trace.csv,
/// audit.csv under out_dir.
int run_design(const ExperimentConfig& config, const RunOptions& options);

/// Warm-started design over the xi/eps grid; writes sweep.csv.
int run_sweep(const ExperimentConfig& config, const RunOptions& options);

/// SCNR across the Doppler grid for a designed waveform; writes doppler.csv.
int run_doppler(const ExperimentConfig& config, const RunOptions& options);

/// Symbol-error-rate sweep for a designed waveform; writes ser.csv.
int run_ser(const ExperimentConfig& config, const RunOptions& options);

/// Cross-checks the analytic paths against their Monte-Carlo and algebraic
/// oracles; writes verify.csv and willie_audit.csv. Returns 0 only if every
/// check passes.
int run_verify(const ExperimentConfig& config, const RunOptions& options);

}  // namespace isac

#endif
