// SPDX-License-Identifier: Apache-2.0

#include "isac/comms.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

namespace {
constexpr double pi = 3.14159265358979323846;
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

std::complex<double> qpsk_map(std::uint8_t bits) {
    switch (bits) {
        case 0b00: return {inv_sqrt2, inv_sqrt2};   // e^{j pi/4}
        case 0b01: return {-inv_sqrt2, inv_sqrt2};  // e^{j 3pi/4}
        case 0b11: return {-inv_sqrt2, -inv_sqrt2}; // e^{j 5pi/4}
        case 0b10: return {inv_sqrt2, -inv_sqrt2};  // e^{j 7pi/4}
        default: throw std::invalid_argument("qpsk_map: bits must be a 2-bit value");
    }
}

std::uint8_t qpsk_demap(std::complex<double> y) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
        throw std::invalid_argument("qpsk_demap: input must be finite");
    const bool re_neg = y.real() < 0.0;
    const bool im_neg = y.imag() < 0.0;
    if (!re_neg && !im_neg) return 0b00;
    if (re_neg && !im_neg) return 0b01;
    if (re_neg && im_neg) return 0b11;
    return 0b10;
}

SymbolFrame SymbolFrame::from_bits(const std::vector<std::uint8_t>& bit_pairs) {
    SymbolFrame frame;
    frame.bits = bit_pairs;
    frame.symbols.resize(static_cast<Eigen::Index>(bit_pairs.size()));
    for (std::size_t i = 0; i < bit_pairs.size(); ++i)
        frame.symbols(static_cast<Eigen::Index>(i)) = qpsk_map(bit_pairs[i]);
    return frame;
}

SymbolFrame SymbolFrame::random(int length, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("SymbolFrame::random: length must be >= 1");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(length));
    StreamRng rng(seed, rng_stream::symbols);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(4));
    return from_bits(bits);
}

PhaseError phase_error(const Eigen::VectorXcd& s, const SymbolFrame& d) {
    if (s.size() != d.symbols.size())
        throw std::invalid_argument("phase_error: length mismatch");
    PhaseError err;
    err.per_element.resize(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        double delta = std::arg(s(i)) - std::arg(d.symbols(i));
        // wrap into (-pi, pi]
        delta = std::remainder(delta, 2.0 * pi);
        if (delta <= -pi) delta += 2.0 * pi;
        err.per_element(i) = std::abs(delta);
        err.max = std::max(err.max, err.per_element(i));
    }
    return err;
}

SerEstimate simulate_ser(const Eigen::VectorXcd& s, const SymbolFrame& d, double snr_db,
                         int trials, std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("simulate_ser: trials must be >= 1e3");
    if (s.size() != d.symbols.size())
        throw std::invalid_argument("simulate_ser: length mismatch");
    const Eigen::Index len = s.size();
    const double mean_energy = s.squaredNorm() / static_cast<double>(len);
    const double noise_var = mean_energy / std::pow(10.0, snr_db / 10.0);

    long errors = 0;
    StreamRng rng(seed, rng_stream::ser);
    const std::uint64_t per_trial = 2ull * static_cast<std::uint64_t>(len);
    for (int t = 0; t < trials; ++t) {
        rng.seek(static_cast<std::uint64_t>(t) * per_trial);
        for (Eigen::Index i = 0; i < len; ++i) {
            const std::complex<double> y = s(i) + rng.cgaussian(noise_var);
            if (qpsk_demap(y) != d.bits[static_cast<std::size_t>(i)]) ++errors;
        }
    }

    SerEstimate est;
    est.observations = static_cast<long>(trials) * static_cast<long>(len);
    est.ser = static_cast<double>(errors) / static_cast<double>(est.observations);
    est.std_error = std::sqrt(est.ser * (1.0 - est.ser) / static_cast<double>(est.observations));
    return est;
}

}  // namespace isac
