// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_COVERT_HPP
#define ISAC_COVERT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Quasi-static channel from the base station to the warden plus the
/// warden's noise floor (linear power).
struct WardenChannel {
    Eigen::VectorXcd h;        // length N_T
    double noise_power = 1.0;  // sigma_w^2, linear
};

/// Finite set of candidate transmit waveforms with uniform prior.
struct Codebook {
    std::vector<Eigen::VectorXcd> words;
};

/// Largest codebook the exact-likelihood routines will enumerate.
constexpr std::size_t max_enumerable_codebook = 4096;

/// Block-diagonal channel operator: (H s)_n = h^T s(n), one output per slot.
struct ChannelOperator {
    Eigen::VectorXcd h;
    ArrayGeometry geometry;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& s) const;
};

ChannelOperator lift_channel(const Eigen::VectorXcd& h, const ArrayGeometry& geometry);

/// |H s|^2 / sigma_w^2; feasible against the covertness budget when this is
/// at most 2 eps^2.
double covert_lhs(const Eigen::VectorXcd& s, const WardenChannel& channel,
                  const ArrayGeometry& geometry);

/// Log-sum upper bound on the divergence between the warden's hypothesis
/// distributions: the codebook average of |H s_r|^2 / sigma_w^2.
double kl_upper_bound(const Codebook& codebook, const WardenChannel& channel,
                      const ArrayGeometry& geometry);

/// Detection-error floor 1 - sqrt(kl / 2) implied by a divergence value.
double deb_lower_bound(double kl);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of the true divergence between the Gaussian mixture
/// the warden sees under transmission and the noise-only distribution.
/// Samples from the mixture and averages the exact log-likelihood ratio
/// (log-sum-exp over the enumerated codebook). Requires samples >= 1e4 and a
/// codebook of at most max_enumerable_codebook words.
McEstimate kl_exact_mc(const Codebook& codebook, const WardenChannel& channel,
                       const ArrayGeometry& geometry, int samples, std::uint64_t seed);

/// Empirical minimum error probability of the warden's exact likelihood-ratio
/// test with equal priors: (false alarms + missed detections) / 2 over
/// `trials` draws per hypothesis. The warden knows the codebook.
McEstimate simulate_willie(const Codebook& codebook, const WardenChannel& channel,
                           const ArrayGeometry& geometry, int trials, std::uint64_t seed);

}  // namespace isac

#endif
