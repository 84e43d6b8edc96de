// SPDX-License-Identifier: Apache-2.0

#include "isac/sca.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "isac/log.hpp"

namespace isac {

namespace {
constexpr double pi = 3.14159265358979323846;

double covert_budget(const DesignParams& params) {
    return 2.0 * params.covert_eps * params.covert_eps;
}

bool covert_enabled(const DesignParams& params) {
    return std::isfinite(params.covert_eps);
}
}  // namespace

void DesignParams::validate() const {
    if (!(papr_cap >= 1.0))
        throw std::invalid_argument("papr_cap must be >= 1 (unit average element power)");
    if (!(amp_floor >= 0.0 && amp_floor <= 1.0))
        throw std::invalid_argument("amp_floor must lie in [0, 1]");
    if (!(phase_tol > 0.0 && phase_tol < pi / 2.0))
        throw std::invalid_argument("phase_tol must lie in (0, pi/2)");
    if (!(covert_eps >= 0.0)) throw std::invalid_argument("covert_eps must be >= 0");
    if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be > 0");
    if (!(stop_tol_db > 0.0)) throw std::invalid_argument("stop_tol_db must be > 0");
    if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
    if (!(feas_tol > 0.0) || !(gap_tol > 0.0) || max_inner < 1)
        throw std::invalid_argument("inner solver tolerances must be positive");
}

AffineMinorant linearize_minorant(const Eigen::MatrixXcd& m, const Waveform& s_ref) {
    if (m.rows() != m.cols() || m.rows() != s_ref.size())
        throw std::invalid_argument("linearize_minorant: dimension mismatch");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument("linearize_minorant: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("linearize_minorant: eigenvalue check failed");
    if (eig.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument("linearize_minorant: matrix is not PSD");
    AffineMinorant out;
    out.gradient = m * s_ref;
    out.value_at_ref = std::real(s_ref.dot(out.gradient));
    return out;
}

std::array<ElementConstraint, 3> phase_wedge_constraints(std::complex<double> symbol, double xi,
                                                         double amp_floor) {
    if (!(xi > 0.0 && xi < pi / 2.0))
        throw std::invalid_argument("phase_wedge_constraints: xi must lie in (0, pi/2)");
    if (std::abs(std::abs(symbol) - 1.0) > 1e-9)
        throw std::invalid_argument("phase_wedge_constraints: symbol must be unit modulus");
    const double dr = symbol.real(), di = symbol.imag();
    const double tan_xi = std::tan(xi);
    // u = conj(symbol) * s:  Re u = dr*Re s + di*Im s,  Im u = dr*Im s - di*Re s
    std::array<ElementConstraint, 3> out;
    out[0] = {-di - tan_xi * dr, dr - tan_xi * di, 0.0};  //  Im u <= tan(xi) Re u
    out[1] = {di - tan_xi * dr, -dr - tan_xi * di, 0.0};  // -Im u <= tan(xi) Re u
    out[2] = {-dr, -di, -amp_floor * std::cos(xi)};       //  Re u >= amp_floor cos(xi)
    return out;
}

double CovertQuadratic::eval(const Eigen::VectorXcd& s) const {
    if (!active) return 0.0;
    const Eigen::VectorXd x = embed_complex(s);
    return x.dot(p * x);
}

CovertQuadratic covert_quadratic(const Eigen::VectorXcd& h, double warden_noise_power,
                                 double eps, const ArrayGeometry& geometry) {
    if (!(warden_noise_power > 0.0))
        throw std::invalid_argument("covert_quadratic: warden noise power must be positive");
    if (h.size() != geometry.num_tx)
        throw std::invalid_argument("covert_quadratic: channel length must equal num_tx");
    CovertQuadratic out;
    if (!std::isfinite(eps)) {
        out.active = false;
        return out;
    }
    const int nt = geometry.num_tx, ns = geometry.num_slots;
    const int len = nt * ns;
    // Per-slot block conj(h) h^T, normalized by the warden noise so the
    // right-hand side is the dimensionless 2 eps^2.
    const Eigen::MatrixXcd block = (h.conjugate() * h.transpose()) / warden_noise_power;
    const Eigen::MatrixXd lifted = lift_hermitian(block); // 2 N_T x 2 N_T
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(ns) * 4 * nt * nt);
    for (int n = 0; n < ns; ++n) {
        const int base = n * nt;
        for (int a = 0; a < 2 * nt; ++a) {
            const int row = (a < nt ? base + a : len + base + (a - nt));
            for (int b = 0; b < 2 * nt; ++b) {
                const double v = lifted(a, b);
                if (v == 0.0) continue;
                const int col = (b < nt ? base + b : len + base + (b - nt));
                trips.emplace_back(row, col, v);
            }
        }
    }
    out.p.resize(2 * len, 2 * len);
    out.p.setFromTriplets(trips.begin(), trips.end());
    out.rhs = 2.0 * eps * eps;
    return out;
}

namespace {

// Per-antenna energy s^H R_t s evaluated directly.
double antenna_energy(const Waveform& s, int antenna, const ArrayGeometry& geometry) {
    double e = 0.0;
    for (int n = 0; n < geometry.num_slots; ++n)
        e += std::norm(s(n * geometry.num_tx + antenna));
    return e;
}

void check_reference_feasible(const Waveform& s_ref, const Scenario& scenario,
                              const DesignParams& params, const SymbolFrame& d,
                              const WardenChannel& warden) {
    const double tol = 1e-6;
    for (Eigen::Index e = 0; e < s_ref.size(); ++e) {
        const double power = std::norm(s_ref(e));
        if (power > params.papr_cap * (1.0 + tol))
            throw std::invalid_argument("assemble_subproblem: reference violates the PAPR cap");
        if (std::sqrt(power) < params.amp_floor * (1.0 - tol) - tol)
            throw std::invalid_argument(
                "assemble_subproblem: reference violates the amplitude floor");
    }
    if (phase_error(s_ref, d).max > params.phase_tol + 1e-9)
        throw std::invalid_argument("assemble_subproblem: reference violates the phase bound");
    if (covert_enabled(params)) {
        const WardenChannel ch{warden.h, warden.noise_power};
        const double lhs = covert_lhs(s_ref, ch, scenario.geometry);
        if (lhs > covert_budget(params) * (1.0 + tol) + 1e-12)
            throw std::invalid_argument(
                "assemble_subproblem: reference violates the covert budget");
    }
}

}  // namespace

ConvexProgram assemble_subproblem(const Waveform& s_ref, const Scenario& scenario,
                                  const DesignParams& params, const SymbolFrame& d,
                                  const WardenChannel& warden,
                                  const std::vector<Eigen::MatrixXcd>* q_per_doppler) {
    params.validate();
    scenario.validate();
    const ArrayGeometry& geom = scenario.geometry;
    const int len = geom.tx_len();
    if (s_ref.size() != len || d.symbols.size() != len)
        throw std::invalid_argument("assemble_subproblem: length mismatch");
    check_reference_feasible(s_ref, scenario, params, d, warden);

    const int dim = 2 * len + 2;
    const int v_idx = 2 * len;
    const int eta_idx = 2 * len + 1;
    ConvexProgram prog(dim);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    c(v_idx) = -1.0;
    c(eta_idx) = params.penalty;
    prog.set_objective(c);

    // SCNR minorant cuts: v <= 2 Re(s^H Q s_ref) - s_ref^H Q s_ref per grid point.
    const auto& grid = scenario.doppler.values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::MatrixXcd q = q_per_doppler != nullptr
                                       ? (*q_per_doppler)[i]
                                       : q_matrix(s_ref, grid[i], scenario);
        const AffineMinorant cut = linearize_minorant(q, s_ref);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        a.head(2 * len) = -2.0 * lift_real_inner(cut.gradient);
        a(v_idx) = 1.0;
        prog.add_linear(a, -cut.value_at_ref, "scnr-cut");
    }

    // Per-antenna energy band around N: convex upper side plus minorant lower side.
    const double slots = static_cast<double>(geom.num_slots);
    for (int t = 0; t < geom.num_tx; ++t) {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(2 * geom.num_slots);
        for (int n = 0; n < geom.num_slots; ++n) {
            const int e = n * geom.num_tx + t;
            trips.emplace_back(e, e, 1.0);
            trips.emplace_back(len + e, len + e, 1.0);
        }
        Eigen::SparseMatrix<double> r_lift(dim, dim);
        r_lift.setFromTriplets(trips.begin(), trips.end());
        Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
        q(eta_idx) = -0.5; // contributes -eta to the quadratic form
        prog.add_quadratic(r_lift, q, -slots, "energy-upper");

        // Linearized lower side: s_ref^H R s_ref - 2 Re(s^H R s_ref) <= eta - N.
        Eigen::VectorXcd r_sref = Eigen::VectorXcd::Zero(len);
        for (int n = 0; n < geom.num_slots; ++n) {
            const int e = n * geom.num_tx + t;
            r_sref(e) = s_ref(e);
        }
        const double ref_energy = antenna_energy(s_ref, t, geom);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        a.head(2 * len) = -2.0 * lift_real_inner(r_sref);
        a(eta_idx) = -1.0;
        prog.add_linear(a, -slots - ref_energy, "energy-lower");
    }

    // Per-element squared-amplitude caps.
    for (int e = 0; e < len; ++e) {
        std::vector<Eigen::Triplet<double>> trips{{e, e, 1.0}, {len + e, len + e, 1.0}};
        Eigen::SparseMatrix<double> p(dim, dim);
        p.setFromTriplets(trips.begin(), trips.end());
        prog.add_quadratic(p, Eigen::VectorXd::Zero(dim), -params.papr_cap, "papr");
    }

    // Per-element amplitude minorants around s_ref.
    for (int e = 0; e < len; ++e) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        a(e) = -2.0 * s_ref(e).real();
        a(len + e) = -2.0 * s_ref(e).imag();
        const double b = -params.amp_floor * params.amp_floor - std::norm(s_ref(e));
        prog.add_linear(a, b, "amplitude");
    }

    // Phase constraints.
    for (int e = 0; e < len; ++e) {
        const std::complex<double> sym = d.symbols(e);
        if (params.phase_mode == PhaseMode::Wedge) {
            for (const ElementConstraint& ec :
                 phase_wedge_constraints(sym, params.phase_tol, params.amp_floor)) {
                Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
                a(e) = ec.coef_re;
                a(len + e) = ec.coef_im;
                prog.add_linear(a, ec.bound, "phase");
            }
        } else {
            // Half-plane Re(conj(sym) s) >= sqrt(amp_floor) cos(xi).
            Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
            a(e) = -sym.real();
            a(len + e) = -sym.imag();
            prog.add_linear(a, -std::sqrt(params.amp_floor) * std::cos(params.phase_tol),
                            "phase");
        }
    }

    // Covertness budget.
    if (covert_enabled(params)) {
        const CovertQuadratic cq =
            covert_quadratic(warden.h, warden.noise_power, params.covert_eps, geom);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<std::size_t>(cq.p.nonZeros()));
        for (int k = 0; k < cq.p.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(cq.p, k); it; ++it)
                trips.emplace_back(it.row(), it.col(), it.value());
        Eigen::SparseMatrix<double> p(dim, dim);
        p.setFromTriplets(trips.begin(), trips.end());
        prog.add_quadratic(p, Eigen::VectorXd::Zero(dim), -cq.rhs, "covert");
    }

    // eta >= 0.
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
    a(eta_idx) = -1.0;
    prog.add_linear(a, 0.0, "eta");

    return prog;
}

Waveform initial_waveform(const SymbolFrame& d, const DesignParams& params,
                          const WardenChannel& warden, const ArrayGeometry& geometry) {
    params.validate();
    if (d.symbols.size() != geometry.tx_len())
        throw std::invalid_argument("initial_waveform: frame length mismatch");
    for (Eigen::Index e = 0; e < d.symbols.size(); ++e)
        if (std::abs(std::abs(d.symbols(e)) - 1.0) > 1e-9)
            throw std::invalid_argument("initial_waveform: symbols must be unit modulus");
    Waveform s = d.symbols;
    if (!covert_enabled(params)) return s;
    const double lhs = covert_lhs(s, warden, geometry);
    const double budget = covert_budget(params);
    if (lhs <= budget) return s;
    const double scale = std::sqrt(budget / lhs);
    if (scale < params.amp_floor || scale < 1e-12)
        throw std::invalid_argument(
            "initial_waveform: covert budget incompatible with the amplitude floor "
            "(required scale " +
            std::to_string(scale) + ")");
    return scale * s;
}

AuditReport audit_design(const Waveform& s, const SymbolFrame& d, const DesignParams& params,
                         const WardenChannel& warden, const Scenario& scenario,
                         double eta_reported) {
    const ArrayGeometry& geom = scenario.geometry;
    AuditReport report;
    auto push = [&](std::string metric, double value, double threshold, bool upper) {
        AuditRow row;
        row.metric = std::move(metric);
        row.value = value;
        row.threshold = threshold;
        row.upper_bound = upper;
        row.pass = upper ? value <= threshold : value >= threshold;
        report.pass = report.pass && row.pass;
        report.rows.push_back(std::move(row));
    };

    double slack = 0.0;
    for (int t = 0; t < geom.num_tx; ++t)
        slack = std::max(slack,
                         std::abs(antenna_energy(s, t, geom) - geom.num_slots));
    push("energy_slack", slack, eta_reported + 1e-6 * geom.num_slots, true);

    double max_power = 0.0, min_amp = std::numeric_limits<double>::infinity();
    for (Eigen::Index e = 0; e < s.size(); ++e) {
        max_power = std::max(max_power, std::norm(s(e)));
        min_amp = std::min(min_amp, std::abs(s(e)));
    }
    push("papr_max_power", max_power, params.papr_cap * (1.0 + 1e-6), true);
    push("amplitude_min", min_amp, params.amp_floor - 1e-6, false);
    push("phase_max", phase_error(s, d).max, params.phase_tol + 1e-6, true);
    if (covert_enabled(params)) {
        push("covert_lhs", covert_lhs(s, warden, scenario.geometry),
             covert_budget(params) * (1.0 + 1e-6) + 1e-15, true);
    }
    return report;
}

namespace {

std::vector<Eigen::MatrixXcd> q_matrices(const Waveform& s, const Scenario& scenario, int jobs) {
    const auto& grid = scenario.doppler.values;
    std::vector<Eigen::MatrixXcd> qs(grid.size());
    const auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) qs[i] = q_matrix(s, grid[i], scenario);
    };
    if (jobs <= 1 || grid.size() < 2) {
        work(0, grid.size());
        return qs;
    }
    const std::size_t workers = std::min<std::size_t>(jobs, grid.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(work, grid.size() * w / workers, grid.size() * (w + 1) / workers);
    for (auto& t : pool) t.join();
    return qs;
}

// Worst case over the grid of (sigma_0^2 / sigma_v^2) s^H Q s, the SCNR under
// the matched optimal filters; ties resolve to the smallest Doppler.
std::pair<double, double> worst_case_from_q(const Waveform& s,
                                            const std::vector<Eigen::MatrixXcd>& qs,
                                            const Scenario& scenario) {
    const double gain = scenario.target_power_linear() / scenario.radar_noise_linear();
    double best = 0.0, arg = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double value = gain * std::real(s.dot(qs[i] * s));
        if (first || value < best) {
            best = value;
            arg = scenario.doppler.values[i];
            first = false;
        }
    }
    return {best, arg};
}

// Strictly feasible-ish starting stack for the subproblem solver; the kernel
// falls back to phase I when any coordinate lands on a boundary.
Eigen::VectorXd subproblem_start(const Waveform& s_ref,
                                 const std::vector<Eigen::MatrixXcd>& qs,
                                 const Scenario& scenario) {
    const int len = scenario.geometry.tx_len();
    Eigen::VectorXd x0(2 * len + 2);
    x0.head(2 * len) = embed_complex(s_ref);
    double v0 = std::numeric_limits<double>::infinity();
    for (const auto& q : qs) v0 = std::min(v0, std::real(s_ref.dot(q * s_ref)));
    x0(2 * len) = v0 - std::max(1e-3, 1e-3 * std::abs(v0));
    double eta0 = 0.0;
    for (int t = 0; t < scenario.geometry.num_tx; ++t)
        eta0 = std::max(eta0, std::abs(antenna_energy(s_ref, t, scenario.geometry) -
                                       scenario.geometry.num_slots));
    x0(2 * len + 1) = eta0 + 1e-3 * scenario.geometry.num_slots;
    return x0;
}

}  // namespace

DesignResult design_waveform(const Scenario& scenario, const DesignParams& params,
                             const SymbolFrame& d, const WardenChannel& warden,
                             const std::optional<Waveform>& initial, int jobs) {
    params.validate();
    scenario.validate();
    const ArrayGeometry& geom = scenario.geometry;

    DesignResult result;
    Waveform s;
    if (initial.has_value()) {
        s = *initial;
        if (s.size() != geom.tx_len())
            throw std::invalid_argument("design_waveform: initial waveform length mismatch");
        // Rescale toward the covert boundary if the provided start violates it.
        if (covert_enabled(params)) {
            const double lhs = covert_lhs(s, warden, geom);
            if (lhs > covert_budget(params)) {
                const double scale = std::sqrt(covert_budget(params) / lhs);
                if (scale < params.amp_floor)
                    throw std::invalid_argument(
                        "design_waveform: initial waveform cannot be scaled into the covert set");
                s *= scale;
            }
        }
    } else {
        s = initial_waveform(d, params, warden, geom);
    }

    SolveOptions inner;
    inner.feas_tol = params.feas_tol;
    inner.gap_tol = params.gap_tol;
    inner.max_iters = params.max_inner;

    std::vector<Eigen::MatrixXcd> qs = q_matrices(s, scenario, jobs);
    double prev_db = to_db(worst_case_from_q(s, qs, scenario).first);

    Waveform best_s = s;
    double best_db = prev_db;
    double best_eta = 0.0;
    result.status = SolveStatus::IterationLimit;

    for (int iter = 1; iter <= params.max_outer; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        ConvexProgram prog = assemble_subproblem(s, scenario, params, d, warden, &qs);
        inner.warm_start = subproblem_start(s, qs, scenario);
        const Solution sol = solve(prog, inner);

        IterationRecord rec;
        rec.iter = iter;
        rec.status = sol.status;

        if (sol.status == SolveStatus::Infeasible ||
            sol.status == SolveStatus::NumericalFailure) {
            rec.scnr_db = prev_db;
            rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t0)
                         .count();
            result.trace.rows.push_back(rec);
            result.status = sol.status;
            result.message = std::string("subproblem ") + to_string(sol.status) +
                             " at iteration " + std::to_string(iter);
            if (sol.status == SolveStatus::Infeasible) {
                result.message += " (family " + sol.worst_family + ", violation " +
                                  std::to_string(sol.infeasibility) + ")";
            }
            log_error("design_waveform: " + result.message);
            break;
        }

        const int len = geom.tx_len();
        const Waveform s_next = extract_complex(sol.point, len);
        const double v_star = sol.point(2 * len);
        const double eta_star = sol.point(2 * len + 1);

        std::vector<Eigen::MatrixXcd> qs_next = q_matrices(s_next, scenario, jobs);
        const double now_db = to_db(worst_case_from_q(s_next, qs_next, scenario).first);

        rec.v = v_star;
        rec.eta = eta_star;

        if (sol.status == SolveStatus::IterationLimit)
            log_warn("design_waveform: inner solver hit its iteration limit at outer iteration " +
                     std::to_string(iter));

        // Monotone safeguard: the subproblem freezes the clutter covariance
        // at the reference, so the exact SCNR of the candidate can slip a
        // hair below the reference near convergence. A non-improving
        // candidate means the surrogate has no ascent left; keep the current
        // iterate and stop. Trace rows always report the accepted iterate.
        if (now_db < prev_db) {
            rec.scnr_db = prev_db;
            rec.ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
            result.trace.rows.push_back(rec);
            result.status = SolveStatus::Optimal;
            break;
        }

        rec.scnr_db = now_db;
        rec.ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        result.trace.rows.push_back(rec);

        s = s_next;
        qs = std::move(qs_next);
        result.eta = eta_star;
        if (now_db > best_db) {
            best_db = now_db;
            best_s = s_next;
            best_eta = eta_star;
        }

        if (now_db - prev_db <= params.stop_tol_db) {
            result.status = SolveStatus::Optimal;
            prev_db = now_db;
            break;
        }
        prev_db = now_db;
    }

    if (result.status == SolveStatus::IterationLimit) {
        // Return the best iterate seen, per the stop-rule contract.
        s = best_s;
        result.eta = best_eta;
        qs = q_matrices(s, scenario, jobs);
        log_warn("design_waveform: outer iteration cap reached, returning the best iterate");
    }

    if (result.status == SolveStatus::Optimal ||
        result.status == SolveStatus::IterationLimit) {
        result.waveform = s;
        const auto wc = worst_case_from_q(s, qs, scenario);
        result.scnr_db = to_db(wc.first);
        result.worst_doppler = wc.second;
        result.bank = matched_filter_bank(s, scenario, jobs);
        result.audit = audit_design(s, d, params, warden, scenario, result.eta);
    } else {
        result.waveform = s; // last feasible reference
    }
    return result;
}

}  // namespace isac
