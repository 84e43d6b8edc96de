// SPDX-License-Identifier: Apache-2.0

#include "isac/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isac {

namespace {
constexpr double pi = 3.14159265358979323846;
// Keeps N_T*N x N_R*N density work within desktop memory.
constexpr int max_stacked_dim = 4096;

void check_angle(double angle, const char* what) {
    if (!(angle > -pi / 2 && angle <= pi / 2)) {
        throw std::invalid_argument(std::string(what) +
                                    " angle must lie in (-pi/2, pi/2], got " +
                                    std::to_string(angle));
    }
}
}  // namespace

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

double wrap_half(double f) {
    double w = f - std::floor(f + 0.5);
    if (w >= 0.5) w -= 1.0; // guard the floor rounding edge
    return w;
}

double ClutterDopplerModel::eval(std::size_t k, double f0) const {
    const double c = k < offset.size() ? offset[k] : 0.0;
    if (mode == ClutterDopplerMode::Static) return wrap_half(c);
    const double r = k < rho.size() ? rho[k] : 0.0;
    return wrap_half(r * f0 + c);
}

void Scenario::validate() const {
    if (geometry.num_tx < 1 || geometry.num_rx < 1 || geometry.num_slots < 1)
        throw std::invalid_argument("array geometry fields must all be >= 1");
    if (geometry.tx_len() > max_stacked_dim || geometry.rx_len() > max_stacked_dim)
        throw std::invalid_argument("stacked dimension exceeds dense-matrix limit " +
                                    std::to_string(max_stacked_dim));
    check_angle(target.angle, "target");
    if (target.kind != ScattererKind::Target)
        throw std::invalid_argument("target scatterer must have kind Target");
    if (std::abs(target.delay) >= geometry.num_slots)
        throw std::invalid_argument("target delay leaves no echo overlap");
    if (!std::isfinite(target.power_dbm))
        throw std::invalid_argument("target power must be finite");
    for (std::size_t k = 0; k < clutter.size(); ++k) {
        const Scatterer& c = clutter[k];
        check_angle(c.angle, "clutter");
        if (c.kind != ScattererKind::Clutter)
            throw std::invalid_argument("clutter scatterer must have kind Clutter");
        if (std::abs(c.delay) >= geometry.num_slots)
            throw std::invalid_argument("clutter delay " + std::to_string(c.delay) +
                                        " leaves no echo overlap");
        if (!std::isfinite(c.power_dbm))
            throw std::invalid_argument("clutter power must be finite");
    }
    if (doppler.values.empty())
        throw std::invalid_argument("Doppler grid must be nonempty");
    for (std::size_t i = 0; i < doppler.values.size(); ++i) {
        const double f = doppler.values[i];
        if (!(f >= -0.5 && f < 0.5))
            throw std::invalid_argument("Doppler grid value outside [-0.5, 0.5)");
        if (i > 0 && !(doppler.values[i - 1] < f))
            throw std::invalid_argument("Doppler grid must be strictly increasing");
    }
    if (clutter_doppler.mode == ClutterDopplerMode::Affine &&
        (clutter_doppler.rho.size() < clutter.size() ||
         clutter_doppler.offset.size() < clutter.size()))
        throw std::invalid_argument("affine clutter Doppler needs rho and offset per patch");
    if (!std::isfinite(noise.radar_noise_dbm) || !std::isfinite(noise.warden_noise_dbm))
        throw std::invalid_argument("noise powers must be finite");
    if (!(radar_noise_linear() > 0.0) || !(warden_noise_linear() > 0.0))
        throw std::invalid_argument("noise powers must convert to positive linear values");
}

double Scenario::radar_noise_linear() const { return dbm_to_linear(noise.radar_noise_dbm); }
double Scenario::warden_noise_linear() const { return dbm_to_linear(noise.warden_noise_dbm); }
double Scenario::target_power_linear() const { return dbm_to_linear(target.power_dbm); }

double Scenario::clutter_to_noise(std::size_t k) const {
    return dbm_to_linear(clutter[k].power_dbm) / radar_noise_linear();
}

namespace {
Eigen::VectorXcd steer(double angle, int n) {
    Eigen::VectorXcd a(n);
    const double step = -pi * std::sin(angle);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(scale, step * m);
    return a;
}
}  // namespace

Eigen::VectorXcd steer_tx(double angle, int num_tx) {
    if (num_tx < 1) throw std::invalid_argument("num_tx must be >= 1");
    return steer(angle, num_tx);
}

Eigen::VectorXcd steer_rx(double angle, int num_rx) {
    if (num_rx < 1) throw std::invalid_argument("num_rx must be >= 1");
    return steer(angle, num_rx);
}

Eigen::VectorXcd doppler_vector(double f, int num_slots) {
    if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
    Eigen::VectorXcd p(num_slots);
    for (int n = 0; n < num_slots; ++n)
        p(n) = std::polar(1.0, 2.0 * pi * f * n);
    return p;
}

Eigen::MatrixXd shift_matrix(int delay, const ArrayGeometry& geometry) {
    if (std::abs(delay) >= geometry.num_slots)
        throw std::invalid_argument("shift_matrix: |delay| must be < num_slots");
    const int dim = geometry.tx_len();
    const int off = geometry.num_tx * delay;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const int col = i - off;
        if (col >= 0 && col < dim) j(i, col) = 1.0;
    }
    return j;
}

Eigen::MatrixXcd build_A(const Scatterer& sc, double doppler, const ArrayGeometry& geometry) {
    if (std::abs(sc.delay) >= geometry.num_slots)
        throw std::invalid_argument("build_A: |delay| must be < num_slots");
    const int nt = geometry.num_tx, nr = geometry.num_rx, ns = geometry.num_slots;
    const Eigen::VectorXcd at = steer_tx(sc.angle, nt);
    const Eigen::VectorXcd ar = steer_rx(sc.angle, nr);
    const Eigen::VectorXcd p = doppler_vector(doppler, ns);
    const Eigen::MatrixXcd spatial = ar * at.transpose(); // N_R x N_T, rank 1

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(geometry.rx_len(), geometry.tx_len());
    for (int n = 0; n < ns; ++n) {
        const int m = n - sc.delay; // input slot feeding output slot n
        if (m < 0 || m >= ns) continue;
        a.block(n * nr, m * nt, nr, nt) = p(n) * spatial;
    }
    return a;
}

Eigen::VectorXcd apply_A(const Scatterer& sc, double doppler, const ArrayGeometry& geometry,
                         const Eigen::VectorXcd& s) {
    if (s.size() != geometry.tx_len())
        throw std::invalid_argument("apply_A: waveform length mismatch");
    if (std::abs(sc.delay) >= geometry.num_slots)
        throw std::invalid_argument("apply_A: |delay| must be < num_slots");
    const int nt = geometry.num_tx, nr = geometry.num_rx, ns = geometry.num_slots;
    const Eigen::VectorXcd at = steer_tx(sc.angle, nt);
    const Eigen::VectorXcd ar = steer_rx(sc.angle, nr);
    const Eigen::VectorXcd p = doppler_vector(doppler, ns);

    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(geometry.rx_len());
    for (int n = 0; n < ns; ++n) {
        const int m = n - sc.delay;
        if (m < 0 || m >= ns) continue;
        const std::complex<double> beam = at.transpose() * s.segment(m * nt, nt);
        y.segment(n * nr, nr) = (p(n) * beam) * ar;
    }
    return y;
}

}  // namespace isac
