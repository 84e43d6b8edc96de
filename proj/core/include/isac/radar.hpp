// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_RADAR_HPP
#define ISAC_RADAR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Stacked transmit waveform, slot-major: element n*N_T + t is antenna t at
/// slot n (0-based).
using Waveform = Eigen::VectorXcd;

/// One receive filter per Doppler grid point.
struct FilterBank {
    std::vector<double> dopplers;
    std::vector<Eigen::VectorXcd> filters;

    const Eigen::VectorXcd& at(double f0) const;
    bool covers(const DopplerGrid& grid) const;
};

/// SCNR values are linear ratios everywhere inside the library; convert for
/// reporting only.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Clutter covariance (normalized by the radar noise power):
/// sum_k q_k (A_k s)(A_k s)^H. Hermitian PSD with rank <= K.
Eigen::MatrixXcd clutter_covariance(const Waveform& s, double f0, const Scenario& scenario);

/// Output signal-to-clutter-plus-noise ratio for waveform s and filter w at
/// target Doppler f0. Rejects w = 0.
double scnr(const Waveform& s, const Eigen::VectorXcd& w, double f0, const Scenario& scenario);

/// Closed-form distortionless filter (Psi + I)^{-1} A0 s, normalized so that
/// w^H A0 s = 1. Rejects A0 s = 0 (target unobservable).
Eigen::VectorXcd optimal_filter(const Waveform& s, double f0, const Scenario& scenario);

/// Q(f0, s) = A0^H (Psi(s, f0) + I)^{-1} A0. Hermitian PSD, and
/// (sigma_0^2 / sigma_v^2) * s^H Q s equals the SCNR under the optimal filter.
Eigen::MatrixXcd q_matrix(const Waveform& s, double f0, const Scenario& scenario);

/// Optimal filter for every Doppler grid point; grid points are independent
/// and are computed in parallel when jobs > 1.
FilterBank matched_filter_bank(const Waveform& s, const Scenario& scenario, int jobs = 1);

/// Minimum SCNR over the Doppler grid and its argmin (ties -> smallest f0).
std::pair<double, double> worst_case_scnr(const Waveform& s, const FilterBank& bank,
                                          const Scenario& scenario);

struct EchoEstimate {
    double scnr_linear = 0.0;
    double std_error = 0.0; // delta-method standard error on the ratio
};

/// Ratio estimates above this are reported as the cap itself (noiseless and
/// clutter-free scenarios push the empirical denominator toward zero).
constexpr double echo_scnr_cap = 1e30;

/// Monte-Carlo SCNR estimate from synthesized echoes: draws target and
/// clutter amplitudes plus receiver noise, forms the stacked echo, applies
/// the given filter (the matched optimal filter when omitted), and returns
/// empirical target power over empirical clutter-plus-noise power.
/// Reproducible for a given seed regardless of scheduling.
EchoEstimate synthesize_echo(const Waveform& s, double f0, const Scenario& scenario,
                             int draws, std::uint64_t seed,
                             const Eigen::VectorXcd* filter = nullptr);

}  // namespace isac

#endif
