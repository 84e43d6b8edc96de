// SPDX-License-Identifier: Apache-2.0

#include "isac/radar.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "isac/rng.hpp"

namespace isac {

const Eigen::VectorXcd& FilterBank::at(double f0) const {
    for (std::size_t i = 0; i < dopplers.size(); ++i)
        if (dopplers[i] == f0) return filters[i];
    throw std::invalid_argument("FilterBank: no filter for requested Doppler");
}

bool FilterBank::covers(const DopplerGrid& grid) const {
    if (dopplers.size() != grid.values.size()) return false;
    for (std::size_t i = 0; i < dopplers.size(); ++i)
        if (dopplers[i] != grid.values[i]) return false;
    return true;
}

Eigen::MatrixXcd clutter_covariance(const Waveform& s, double f0, const Scenario& scenario) {
    const int dim = scenario.geometry.rx_len();
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t k = 0; k < scenario.clutter.size(); ++k) {
        const double fk = scenario.clutter_doppler.eval(k, f0);
        const Eigen::VectorXcd y = apply_A(scenario.clutter[k], fk, scenario.geometry, s);
        psi.noalias() += scenario.clutter_to_noise(k) * (y * y.adjoint());
    }
    return psi;
}

namespace {

// Cholesky of (Psi + I); always positive definite thanks to the identity.
Eigen::LLT<Eigen::MatrixXcd> covariance_factor(const Waveform& s, double f0,
                                               const Scenario& scenario) {
    Eigen::MatrixXcd m = clutter_covariance(s, f0, scenario);
    m.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("covariance factorization failed");
    return llt;
}

}  // namespace

double scnr(const Waveform& s, const Eigen::VectorXcd& w, double f0, const Scenario& scenario) {
    if (w.size() != scenario.geometry.rx_len())
        throw std::invalid_argument("scnr: filter length mismatch");
    if (w.norm() == 0.0) throw std::invalid_argument("scnr: filter must be nonzero");
    const Eigen::VectorXcd target = apply_A(scenario.target, f0, scenario.geometry, s);
    const std::complex<double> gain = w.dot(target); // w^H A0 s
    const Eigen::MatrixXcd psi = clutter_covariance(s, f0, scenario);
    const double denom_quad = std::real(w.dot(psi * w)) + w.squaredNorm();
    const double num = std::norm(gain) * scenario.target_power_linear();
    return num / (scenario.radar_noise_linear() * denom_quad);
}

Eigen::VectorXcd optimal_filter(const Waveform& s, double f0, const Scenario& scenario) {
    const Eigen::VectorXcd target = apply_A(scenario.target, f0, scenario.geometry, s);
    if (target.norm() == 0.0)
        throw std::invalid_argument("optimal_filter: A0 s = 0, target unobservable");
    const auto llt = covariance_factor(s, f0, scenario);
    const Eigen::VectorXcd z = llt.solve(target);
    const double kappa = std::real(target.dot(z)); // s^H A0^H (Psi+I)^{-1} A0 s, > 0
    return z / kappa;
}

Eigen::MatrixXcd q_matrix(const Waveform& s, double f0, const Scenario& scenario) {
    const Eigen::MatrixXcd a0 = build_A(scenario.target, f0, scenario.geometry);
    const auto llt = covariance_factor(s, f0, scenario);
    Eigen::MatrixXcd q = a0.adjoint() * llt.solve(a0);
    // symmetrize away factorization roundoff; tolerance 1e-12 relative
    const double asym = (q - q.adjoint()).norm();
    if (asym > 1e-12 * std::max(1.0, q.norm()))
        throw std::runtime_error("q_matrix: Hermitian residual above tolerance");
    return 0.5 * (q + q.adjoint().eval());
}

FilterBank matched_filter_bank(const Waveform& s, const Scenario& scenario, int jobs) {
    FilterBank bank;
    bank.dopplers = scenario.doppler.values;
    bank.filters.resize(bank.dopplers.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            bank.filters[i] = optimal_filter(s, bank.dopplers[i], scenario);
    };
    const std::size_t n = bank.dopplers.size();
    if (jobs <= 1 || n < 2) {
        work(0, n);
        return bank;
    }
    const std::size_t workers = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
    return bank;
}

std::pair<double, double> worst_case_scnr(const Waveform& s, const FilterBank& bank,
                                          const Scenario& scenario) {
    if (!bank.covers(scenario.doppler))
        throw std::invalid_argument("worst_case_scnr: filter bank does not cover the grid");
    double best = 0.0, arg = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < bank.dopplers.size(); ++i) {
        const double value = scnr(s, bank.filters[i], bank.dopplers[i], scenario);
        if (first || value < best) { // strict: ties keep the smallest f0
            best = value;
            arg = bank.dopplers[i];
            first = false;
        }
    }
    return {best, arg};
}

EchoEstimate synthesize_echo(const Waveform& s, double f0, const Scenario& scenario,
                             int draws, std::uint64_t seed, const Eigen::VectorXcd* filter) {
    if (draws < 1) throw std::invalid_argument("synthesize_echo: draws must be >= 1");
    const Eigen::VectorXcd w = filter != nullptr ? *filter : optimal_filter(s, f0, scenario);

    const int dim = scenario.geometry.rx_len();
    const Eigen::VectorXcd target = apply_A(scenario.target, f0, scenario.geometry, s);
    std::vector<Eigen::VectorXcd> clutter_resp;
    clutter_resp.reserve(scenario.clutter.size());
    for (std::size_t k = 0; k < scenario.clutter.size(); ++k) {
        const double fk = scenario.clutter_doppler.eval(k, f0);
        clutter_resp.push_back(apply_A(scenario.clutter[k], fk, scenario.geometry, s));
    }

    const double sig0 = scenario.target_power_linear();
    const double sigv = scenario.radar_noise_linear();

    // Per-draw counter window: target amp, K clutter amps, dim noise samples
    // (2 counter slots each) keeps draws independent of loop scheduling.
    const std::uint64_t slots_per_draw = 2ull * (1 + clutter_resp.size() + dim);

    double t_sum = 0.0, t_sq = 0.0, c_sum = 0.0, c_sq = 0.0;
    Eigen::VectorXcd x(dim);
    StreamRng rng(seed, rng_stream::echo);
    for (int j = 0; j < draws; ++j) {
        rng.seek(static_cast<std::uint64_t>(j) * slots_per_draw);
        const std::complex<double> alpha0 = rng.cgaussian(sig0);
        x.setZero();
        for (std::size_t k = 0; k < clutter_resp.size(); ++k) {
            const double sigk = dbm_to_linear(scenario.clutter[k].power_dbm);
            x += rng.cgaussian(sigk) * clutter_resp[k];
        }
        for (int i = 0; i < dim; ++i) x(i) += rng.cgaussian(sigv);

        const double t_pow = std::norm(alpha0 * w.dot(target)); // target-only output power
        const double c_pow = std::norm(w.dot(x));               // clutter + noise output power
        t_sum += t_pow;
        t_sq += t_pow * t_pow;
        c_sum += c_pow;
        c_sq += c_pow * c_pow;
    }

    const double n = static_cast<double>(draws);
    const double t_mean = t_sum / n, c_mean = c_sum / n;
    EchoEstimate est;
    if (!(c_mean > 0.0)) {
        est.scnr_linear = echo_scnr_cap;
        est.std_error = 0.0;
        return est;
    }
    const double ratio = t_mean / c_mean;
    est.scnr_linear = std::min(ratio, echo_scnr_cap);
    const double t_var = std::max(0.0, t_sq / n - t_mean * t_mean);
    const double c_var = std::max(0.0, c_sq / n - c_mean * c_mean);
    est.std_error = std::abs(ratio) *
                    std::sqrt((t_var / (t_mean * t_mean) + c_var / (c_mean * c_mean)) / n);
    return est;
}

}  // namespace isac
