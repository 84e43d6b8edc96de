// SPDX-License-Identifier: Apache-2.0

#include "isac/covert.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "isac/rng.hpp"

namespace isac {

Eigen::VectorXcd ChannelOperator::apply(const Eigen::VectorXcd& s) const {
    if (s.size() != geometry.tx_len())
        throw std::invalid_argument("ChannelOperator: waveform length mismatch");
    const int nt = geometry.num_tx, ns = geometry.num_slots;
    Eigen::VectorXcd y(ns);
    for (int n = 0; n < ns; ++n)
        y(n) = h.transpose() * s.segment(n * nt, nt); // h^T s(n), no conjugation
    return y;
}

ChannelOperator lift_channel(const Eigen::VectorXcd& h, const ArrayGeometry& geometry) {
    if (h.size() != geometry.num_tx)
        throw std::invalid_argument("lift_channel: channel length must equal num_tx");
    return ChannelOperator{h, geometry};
}

double covert_lhs(const Eigen::VectorXcd& s, const WardenChannel& channel,
                  const ArrayGeometry& geometry) {
    if (!(channel.noise_power > 0.0))
        throw std::invalid_argument("covert_lhs: warden noise power must be positive");
    const ChannelOperator op = lift_channel(channel.h, geometry);
    return op.apply(s).squaredNorm() / channel.noise_power;
}

double kl_upper_bound(const Codebook& codebook, const WardenChannel& channel,
                      const ArrayGeometry& geometry) {
    if (codebook.words.empty()) throw std::invalid_argument("kl_upper_bound: empty codebook");
    double sum = 0.0;
    for (const auto& word : codebook.words)
        sum += covert_lhs(word, channel, geometry);
    return sum / static_cast<double>(codebook.words.size());
}

double deb_lower_bound(double kl) {
    if (kl < 0.0) throw std::invalid_argument("deb_lower_bound: divergence must be nonnegative");
    return 1.0 - std::sqrt(kl / 2.0);
}

namespace {

void check_enumerable(const Codebook& codebook, int samples, int min_samples) {
    if (codebook.words.empty()) throw std::invalid_argument("codebook must be nonempty");
    if (codebook.words.size() > max_enumerable_codebook)
        throw std::invalid_argument("codebook too large to enumerate");
    if (samples < min_samples)
        throw std::invalid_argument("too few Monte-Carlo samples requested");
    const Eigen::Index len = codebook.words.front().size();
    for (const auto& w : codebook.words)
        if (w.size() != len) throw std::invalid_argument("codebook words differ in length");
}

// Exact log-likelihood ratio log f(y|H1) - log f(y|H0) for the enumerated
// mixture; the shared Gaussian normalization cancels. Log-sum-exp keeps the
// mixture term alive at frame lengths where direct exponentials underflow.
double log_likelihood_ratio(const Eigen::VectorXcd& y,
                            const std::vector<Eigen::VectorXcd>& means, double noise_power) {
    const double big = static_cast<double>(means.size());
    double max_exp = -std::numeric_limits<double>::infinity();
    std::vector<double> exps(means.size());
    for (std::size_t r = 0; r < means.size(); ++r) {
        exps[r] = -(y - means[r]).squaredNorm() / noise_power;
        max_exp = std::max(max_exp, exps[r]);
    }
    double acc = 0.0;
    for (double e : exps) acc += std::exp(e - max_exp);
    const double log_mix = max_exp + std::log(acc) - std::log(big);
    return log_mix + y.squaredNorm() / noise_power;
}

std::vector<Eigen::VectorXcd> channel_means(const Codebook& codebook,
                                            const WardenChannel& channel,
                                            const ArrayGeometry& geometry) {
    const ChannelOperator op = lift_channel(channel.h, geometry);
    std::vector<Eigen::VectorXcd> means;
    means.reserve(codebook.words.size());
    for (const auto& word : codebook.words) means.push_back(op.apply(word));
    return means;
}

}  // namespace

McEstimate kl_exact_mc(const Codebook& codebook, const WardenChannel& channel,
                       const ArrayGeometry& geometry, int samples, std::uint64_t seed) {
    check_enumerable(codebook, samples, 10000);
    const auto means = channel_means(codebook, channel, geometry);
    const int slots = geometry.num_slots;
    const std::uint64_t per_draw = 1 + 2ull * slots;

    double sum = 0.0, sumsq = 0.0;
    Eigen::VectorXcd y(slots);
    StreamRng rng(seed, rng_stream::kl_mc);
    for (int j = 0; j < samples; ++j) {
        rng.seek(static_cast<std::uint64_t>(j) * per_draw);
        const std::size_t r = rng.below(means.size());
        for (int n = 0; n < slots; ++n)
            y(n) = means[r](n) + rng.cgaussian(channel.noise_power);
        const double llr = log_likelihood_ratio(y, means, channel.noise_power);
        sum += llr;
        sumsq += llr * llr;
    }
    const double n = static_cast<double>(samples);
    McEstimate est;
    est.estimate = sum / n;
    est.std_error = std::sqrt(std::max(0.0, sumsq / n - est.estimate * est.estimate) / n);
    return est;
}

McEstimate simulate_willie(const Codebook& codebook, const WardenChannel& channel,
                           const ArrayGeometry& geometry, int trials, std::uint64_t seed) {
    check_enumerable(codebook, trials, 1000);
    const auto means = channel_means(codebook, channel, geometry);
    const int slots = geometry.num_slots;
    const std::uint64_t per_draw = 1 + 2ull * slots;

    // False alarms: noise-only draws the test flags as transmission.
    long false_alarms = 0;
    Eigen::VectorXcd y(slots);
    {
        StreamRng rng(seed, rng_stream::willie_h0);
        for (int j = 0; j < trials; ++j) {
            rng.seek(static_cast<std::uint64_t>(j) * per_draw);
            for (int n = 0; n < slots; ++n) y(n) = rng.cgaussian(channel.noise_power);
            if (log_likelihood_ratio(y, means, channel.noise_power) > 0.0) ++false_alarms;
        }
    }
    // Missed detections: transmission draws the test flags as noise.
    long misses = 0;
    {
        StreamRng rng(seed, rng_stream::willie_h1);
        for (int j = 0; j < trials; ++j) {
            rng.seek(static_cast<std::uint64_t>(j) * per_draw);
            const std::size_t r = rng.below(means.size());
            for (int n = 0; n < slots; ++n)
                y(n) = means[r](n) + rng.cgaussian(channel.noise_power);
            if (!(log_likelihood_ratio(y, means, channel.noise_power) > 0.0)) ++misses;
        }
    }

    const double n = static_cast<double>(trials);
    const double p_fa = false_alarms / n;
    const double p_md = misses / n;
    McEstimate est;
    est.estimate = 0.5 * (p_fa + p_md);
    est.std_error = 0.5 * std::sqrt(p_fa * (1.0 - p_fa) / n + p_md * (1.0 - p_md) / n);
    return est;
}

}  // namespace isac
