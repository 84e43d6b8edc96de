// SPDX-License-Identifier: Apache-2.0

#ifndef ISAC_SCA_HPP
#define ISAC_SCA_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "isac/comms.hpp"
#include "isac/convex.hpp"
#include "isac/covert.hpp"
#include "isac/radar.hpp"
#include "isac/scenario.hpp"

namespace isac {

enum class PhaseMode {
    Wedge,     // exact convex wedge: |Im(d* s)| <= tan(xi) Re(d* s), Re >= gamma_low cos(xi)
    HalfPlane, // single half-plane Re(d* s) >= sqrt(gamma_low) cos(xi)
};

/// All knobs of the relaxed design problem.
struct DesignParams {
    double papr_cap = 2.0;      // gamma_up: per-element squared-amplitude cap
    double amp_floor = 0.5;     // gamma_low: per-element amplitude lower bound
    double phase_tol = 0.5236;  // xi, radians, must be < pi/2
    double covert_eps = 0.1;    // epsilon; +infinity disables the constraint
    double penalty = 10.0;      // alpha, weight on the energy slack eta
    double stop_tol_db = 1e-3;  // varsigma: stop when |delta SCNR| dips below
    int max_outer = 100;
    double feas_tol = 1e-8;     // forwarded to the convex kernel
    double gap_tol = 1e-8;
    int max_inner = 200;
    PhaseMode phase_mode = PhaseMode::Wedge;

    void validate() const; // throws std::invalid_argument
};

struct IterationRecord {
    int iter = 0;
    double scnr_db = 0.0; // worst case over the Doppler grid, after the update
    double v = 0.0;
    double eta = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    double ms = 0.0; // wall time of the iteration
};

struct ConvergenceTrace {
    std::vector<IterationRecord> rows;
};

/// Affine lower bound on the quadratic form s^H M s around s_ref:
///   L(s) = 2 Re(s^H gradient) - value_at_ref,
/// valid for PSD M with equality at s = s_ref.
struct AffineMinorant {
    Eigen::VectorXcd gradient; // M s_ref
    double value_at_ref = 0.0; // s_ref^H M s_ref

    double eval(const Eigen::VectorXcd& s) const {
        return 2.0 * std::real(s.dot(gradient)) - value_at_ref;
    }
};

/// Rejects non-PSD M (eigenvalue floor -1e-9 relative).
AffineMinorant linearize_minorant(const Eigen::MatrixXcd& m, const Waveform& s_ref);

/// One linear inequality coef_re*Re(s_e) + coef_im*Im(s_e) <= bound on a
/// single waveform element.
struct ElementConstraint {
    double coef_re = 0.0;
    double coef_im = 0.0;
    double bound = 0.0;
};

/// The exact convex wedge for the per-element phase-difference constraint.
/// Any s satisfying the three lines has |arg s - arg symbol| <= xi (for
/// nonzero s). Rejects xi >= pi/2 and non-unit symbols.
std::array<ElementConstraint, 3> phase_wedge_constraints(std::complex<double> symbol, double xi,
                                                         double amp_floor);

/// Covertness budget as a quadratic form on the lifted waveform:
///   x^T P x <= rhs  with  x = [Re s; Im s],
/// where P is the (noise-normalized) lifting of I_N kron (conj(h) h^T) built
/// block-by-block; the stacked channel matrix is never materialized densely.
struct CovertQuadratic {
    Eigen::SparseMatrix<double> p; // over the 2 N_T N lifted coordinates
    double rhs = 0.0;              // 2 eps^2
    bool active = true;            // false when eps = +infinity

    double eval(const Eigen::VectorXcd& s) const;
};

CovertQuadratic covert_quadratic(const Eigen::VectorXcd& h, double warden_noise_power,
                                 double eps, const ArrayGeometry& geometry);

/// Feasible starting waveform: the symbol frame itself, scaled toward the
/// covert set when the frame violates the budget. Throws when no scaling can
/// satisfy both the budget and the amplitude floor.
Waveform initial_waveform(const SymbolFrame& d, const DesignParams& params,
                          const WardenChannel& warden, const ArrayGeometry& geometry);

/// Builds the convex subproblem around s_ref over x = [Re s; Im s; v; eta]:
/// minimize -v + alpha*eta subject to one SCNR minorant cut per grid Doppler,
/// the per-antenna energy band, per-element amplitude caps and minorants, the
/// phase constraints, the covertness budget, and eta >= 0. Verifies that
/// s_ref is feasible for the non-relaxed constraint families before building.
/// `q_per_doppler`, when given, supplies precomputed Q matrices aligned with
/// the scenario grid.
ConvexProgram assemble_subproblem(const Waveform& s_ref, const Scenario& scenario,
                                  const DesignParams& params, const SymbolFrame& d,
                                  const WardenChannel& warden,
                                  const std::vector<Eigen::MatrixXcd>* q_per_doppler = nullptr);

struct AuditRow {
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool upper_bound = true; // pass means value <= threshold (>= otherwise)
    bool pass = false;
};

struct AuditReport {
    std::vector<AuditRow> rows;
    bool pass = true;
};

/// Direct re-evaluation of the design constraints on a finished waveform
/// (no solver residuals involved).
AuditReport audit_design(const Waveform& s, const SymbolFrame& d, const DesignParams& params,
                         const WardenChannel& warden, const Scenario& scenario,
                         double eta_reported);

struct DesignResult {
    Waveform waveform;
    FilterBank bank;
    ConvergenceTrace trace;
    SolveStatus status = SolveStatus::NumericalFailure;
    double scnr_db = 0.0;     // worst case over the grid at the final iterate
    double worst_doppler = 0.0;
    double eta = 0.0;         // energy slack reported by the final subproblem
    AuditReport audit;
    std::string message;      // abort diagnostics, empty on success
};

/// Alternating design loop: closed-form filters, minorant subproblem, repeat
/// until the worst-case SCNR settles. Deterministic for fixed inputs.
DesignResult design_waveform(const Scenario& scenario, const DesignParams& params,
                             const SymbolFrame& d, const WardenChannel& warden,
                             const std::optional<Waveform>& initial = std::nullopt,
                             int jobs = 1);

}  // namespace isac

#endif
