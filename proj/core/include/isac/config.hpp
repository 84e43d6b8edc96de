// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_CONFIG_HPP
#define ISAC_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/comms.hpp"
#include "isac/covert.hpp"
#include "isac/sca.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Parse or validation failure, anchored to "source:line: message".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& source, int line, const std::string& message)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// A full experiment description: scenario, design knobs, symbol and warden
/// sources, sweep axes, and Monte-Carlo budgets.
struct ExperimentConfig {
    Scenario scenario;
    DesignParams params;

    bool symbols_random = true;
    std::vector<std::uint8_t> symbol_bits; // flat 0/1 list, two per element

    bool warden_random = true;    // seeded Rayleigh draw when true
    double warden_gain_db = -125; // E|h_i|^2 in dB for the Rayleigh draw
    Eigen::VectorXcd warden_h;    // explicit channel otherwise

    std::vector<double> sweep_xi;
    std::vector<double> sweep_eps;
    std::vector<double> ser_snr_db;
    int ser_trials = 100000;
    int echo_draws = 100000;
    int kl_samples = 20000;
    int lrt_trials = 20000;
    std::uint64_t seed = 1;

    SymbolFrame make_symbols(std::uint64_t seed) const;
    WardenChannel make_warden(std::uint64_t seed) const;
};

/// Parses the versioned key-value text format (see the README for the
/// schema). Throws ConfigError with a line anchor on malformed input.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Shrink any configuration to the desk-scale geometry (4x4 arrays, 16
/// slots); everything else is left untouched.
void apply_desk_scale(ExperimentConfig& config);

}  // namespace isac

#endif
