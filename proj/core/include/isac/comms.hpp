// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_COMMS_HPP
#define ISAC_COMMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace isac {

/// QPSK frame carried by the waveform: unit-modulus constellation points and
/// the source bits behind them (two bits per symbol, Gray mapped).
struct SymbolFrame {
    Eigen::VectorXcd symbols;
    std::vector<std::uint8_t> bits; // one entry per symbol, values 0..3

    static SymbolFrame from_bits(const std::vector<std::uint8_t>& bit_pairs);
    static SymbolFrame random(int length, std::uint64_t seed);
};

/// Gray mapping: 00 -> e^{j pi/4}, 01 -> e^{j 3pi/4}, 11 -> e^{j 5pi/4},
/// 10 -> e^{j 7pi/4}. `bits` packs the pair as (first << 1) | second.
std::complex<double> qpsk_map(std::uint8_t bits);

/// Nearest-constellation decision by quadrant signs; boundary points resolve
/// toward nonnegative real/imaginary parts, so y = 0 maps to 00.
std::uint8_t qpsk_demap(std::complex<double> y);

struct PhaseError {
    Eigen::VectorXd per_element; // |wrapped(arg s - arg d)|
    double max = 0.0;
};

/// Element-wise wrapped phase distortion of a waveform against its frame.
PhaseError phase_error(const Eigen::VectorXcd& s, const SymbolFrame& d);

struct SerEstimate {
    double ser = 0.0;
    double std_error = 0.0;
    long observations = 0;
};

/// Empirical symbol error rate at Bob: each waveform element is observed
/// through an identity channel plus circular Gaussian noise whose variance is
/// mean-element-energy / 10^(snr_db/10), demapped, and compared against the
/// frame bits. Requires trials >= 1e3.
SerEstimate simulate_ser(const Eigen::VectorXcd& s, const SymbolFrame& d, double snr_db,
                         int trials, std::uint64_t seed);

}  // namespace isac

#endif
