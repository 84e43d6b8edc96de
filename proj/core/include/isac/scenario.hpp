// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_SCENARIO_HPP
#define ISAC_SCENARIO_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

namespace isac {

/// Uniform linear arrays at the base station and the slow-time frame length.
struct ArrayGeometry {
    int num_tx = 1;    // transmit antennas
    int num_rx = 1;    // receive antennas
    int num_slots = 1; // time slots per frame

    int tx_len() const { return num_tx * num_slots; }
    int rx_len() const { return num_rx * num_slots; }
};

enum class ScattererKind { Target, Clutter };

/// A point scatterer: the target or one clutter patch.
struct Scatterer {
    double angle = 0.0;     // azimuth, radians in (-pi/2, pi/2]
    int delay = 0;          // discrete slot delay, |delay| < num_slots
    double power_dbm = 0.0; // echo power E|alpha|^2
    ScattererKind kind = ScattererKind::Clutter;
};

/// Finite set of candidate target Dopplers (normalized, cycles per slot).
struct DopplerGrid {
    std::vector<double> values; // strictly increasing, within [-0.5, 0.5)
};

enum class ClutterDopplerMode { Static, Affine };

/// Clutter Doppler as a function of the target Doppler hypothesis:
/// Static uses a fixed offset per patch, Affine uses rho*f0 + offset.
struct ClutterDopplerModel {
    ClutterDopplerMode mode = ClutterDopplerMode::Static;
    std::vector<double> rho;    // slope per clutter patch (Affine)
    std::vector<double> offset; // fixed offset per clutter patch

    double eval(std::size_t k, double f0) const;
};

struct NoiseModel {
    double radar_noise_dbm = 0.0;  // sigma_v^2
    double warden_noise_dbm = 0.0; // sigma_w^2
};

/// Everything that defines the physical setup. Immutable after construction;
/// all member functions are pure, so sharing across threads is safe.
struct Scenario {
    ArrayGeometry geometry;
    Scatterer target;
    std::vector<Scatterer> clutter;
    DopplerGrid doppler;
    ClutterDopplerModel clutter_doppler;
    NoiseModel noise;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    double radar_noise_linear() const;
    double warden_noise_linear() const;
    double target_power_linear() const;
    /// Clutter-to-noise power ratio q_k.
    double clutter_to_noise(std::size_t k) const;
};

double dbm_to_linear(double dbm);

/// Wrap a normalized frequency into [-0.5, 0.5).
double wrap_half(double f);

/// Unit-norm transmit steering vector, entry m = exp(-j*pi*m*sin(angle))/sqrt(N_T).
Eigen::VectorXcd steer_tx(double angle, int num_tx);

/// Unit-norm receive steering vector.
Eigen::VectorXcd steer_rx(double angle, int num_rx);

/// Slow-time Doppler phase ramp, entry n = exp(j*2*pi*n*f), length num_slots.
Eigen::VectorXcd doppler_vector(double f, int num_slots);

/// Slot-delay operator on the stacked waveform: entry (i,j) = 1 iff
/// i - j = num_tx * delay (0-based and 1-based agree on the difference).
/// Signed delays are allowed; |delay| >= num_slots is rejected because the
/// shifted echo would vanish entirely.
Eigen::MatrixXd shift_matrix(int delay, const ArrayGeometry& geometry);

/// Dense space-time response matrix
///   A = (Diag(doppler ramp) kron (a_r a_t^T)) * J_delay,
/// mapping the stacked transmit waveform to the stacked receive echo.
Eigen::MatrixXcd build_A(const Scatterer& sc, double doppler, const ArrayGeometry& geometry);

/// Matrix-free product build_A(sc, doppler, geometry) * s.
Eigen::VectorXcd apply_A(const Scatterer& sc, double doppler, const ArrayGeometry& geometry,
                         const Eigen::VectorXcd& s);

}  // namespace isac

#endif
