// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "isac/rng.hpp"
#include "isac/sca.hpp"

using namespace isac;
using cd = std::complex<double>;

namespace {
constexpr double pi = 3.14159265358979323846;

Scenario small_scenario() {
    Scenario sc;
    sc.geometry = {2, 2, 8};
    sc.target = {0.0, 0, 10.0, ScattererKind::Target};
    sc.clutter = {{0.9, 1, 10.0, ScattererKind::Clutter},
                  {-0.7, -1, 10.0, ScattererKind::Clutter}};
    sc.clutter_doppler.offset = {0.0, 0.0};
    sc.clutter_doppler.rho = {0.0, 0.0};
    sc.doppler.values = {-0.2, 0.0, 0.2};
    sc.noise.radar_noise_dbm = 0.0;
    sc.noise.warden_noise_dbm = 0.0;
    return sc;
}

DesignParams easy_params() {
    DesignParams p;
    p.papr_cap = 2.0;
    p.amp_floor = 0.5;
    p.phase_tol = pi / 6;
    p.covert_eps = std::numeric_limits<double>::infinity();
    return p;
}

WardenChannel unit_warden(int num_tx) {
    WardenChannel ch;
    ch.noise_power = 1.0;
    ch.h = Eigen::VectorXcd::Zero(num_tx);
    return ch;
}

Eigen::VectorXcd random_complex(StreamRng& rng, int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cgaussian(1.0);
    return v;
}

}  // namespace

TEST_CASE("minorant: equality at the reference, domination everywhere") {
    StreamRng rng(31, 1);
    const int n = 8;
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian(1.0);
    const Eigen::MatrixXcd m = g * g.adjoint() / double(n);
    const Eigen::VectorXcd s_ref = random_complex(rng, n);

    const AffineMinorant cut = linearize_minorant(m, s_ref);
    const double at_ref = std::real(s_ref.dot(m * s_ref));
    CHECK(std::abs(cut.eval(s_ref) - at_ref) <= 1e-10 * std::max(1.0, at_ref));

    const AffineMinorant zero = linearize_minorant(Eigen::MatrixXcd::Zero(n, n), s_ref);
    CHECK(zero.eval(random_complex(rng, n)) == 0.0);

    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::VectorXcd s = random_complex(rng, n);
        const double quad = std::real(s.dot(m * s));
        CHECK(cut.eval(s) <= quad + 1e-9 * std::max(1.0, quad));
    }

    Eigen::MatrixXcd not_psd = -Eigen::MatrixXcd::Identity(n, n);
    CHECK_THROWS_AS(linearize_minorant(not_psd, s_ref), std::invalid_argument);
}

TEST_CASE("phase wedge accepts and rejects the documented points") {
    const auto feasible = [](cd symbol, double xi, double floor_v, cd s) {
        for (const ElementConstraint& ec : phase_wedge_constraints(symbol, xi, floor_v))
            if (ec.coef_re * s.real() + ec.coef_im * s.imag() > ec.bound + 1e-12)
                return false;
        return true;
    };

    CHECK(feasible(cd(1, 0), pi / 4, 0.5, cd(1.0, 0.5)));   // arg ~ 0.4636 < pi/4
    CHECK(!feasible(cd(1, 0), pi / 4, 0.5, cd(0.0, 1.0)));  // arg = pi/2
    const cd q = std::polar(1.0, pi / 4);
    CHECK(feasible(q, 0.05, 0.5, q)); // exact symbol passes any xi > 0

    CHECK_THROWS_AS(phase_wedge_constraints(cd(1, 0), pi / 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(phase_wedge_constraints(cd(2, 0), pi / 4, 0.5), std::invalid_argument);
}

TEST_CASE("phase wedge implies the phase bound") {
    StreamRng rng(32, 1);
    for (int trial = 0; trial < 500; ++trial) {
        const cd symbol = std::polar(1.0, 2 * pi * rng.uniform());
        const double xi = 0.1 + 1.3 * rng.uniform();
        const cd s = rng.cgaussian(1.0);
        bool ok = true;
        for (const ElementConstraint& ec : phase_wedge_constraints(symbol, xi, 0.3))
            if (ec.coef_re * s.real() + ec.coef_im * s.imag() > ec.bound) ok = false;
        if (!ok) continue;
        double delta = std::arg(s) - std::arg(symbol);
        delta = std::remainder(delta, 2 * pi);
        CHECK(std::abs(delta) <= xi + 1e-9);
    }
}

TEST_CASE("covert quadratic equals the per-slot sum") {
    const ArrayGeometry geom{3, 2, 5};
    StreamRng rng(33, 1);
    const Eigen::VectorXcd h = random_complex(rng, 3);
    const double sigw = 0.7;
    const CovertQuadratic cq = covert_quadratic(h, sigw, 0.2, geom);
    REQUIRE(cq.active);
    CHECK(cq.rhs == doctest::Approx(2 * 0.2 * 0.2));

    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXcd s = random_complex(rng, geom.tx_len());
        double direct = 0.0;
        for (int n = 0; n < geom.num_slots; ++n) {
            cd acc(0, 0);
            for (int t = 0; t < geom.num_tx; ++t) acc += h(t) * s(n * geom.num_tx + t);
            direct += std::norm(acc);
        }
        direct /= sigw;
        CHECK(std::abs(cq.eval(s) - direct) <= 1e-12 * std::max(1.0, direct));
    }

    // zero channel: always satisfiable
    const CovertQuadratic zero = covert_quadratic(Eigen::VectorXcd::Zero(3), sigw, 0.2, geom);
    CHECK(zero.eval(random_complex(rng, geom.tx_len())) == doctest::Approx(0.0));

    // eps = 0 with a live channel forces h^T s(n) = 0 for every slot
    const CovertQuadratic hard = covert_quadratic(h, sigw, 0.0, geom);
    CHECK(hard.rhs == 0.0);
    const Eigen::VectorXcd s = random_complex(rng, geom.tx_len());
    CHECK(hard.eval(s) > 0.0); // generic s violates the forced equality

    // eps = inf disables the constraint
    CHECK(!covert_quadratic(h, sigw, std::numeric_limits<double>::infinity(), geom).active);
}

TEST_CASE("subproblem constraint counts for the smallest geometry") {
    Scenario sc;
    sc.geometry = {1, 1, 2};
    sc.target = {0.0, 0, 10.0, ScattererKind::Target};
    sc.doppler.values = {0.0};
    sc.noise.radar_noise_dbm = 0.0;
    sc.noise.warden_noise_dbm = 0.0;

    DesignParams params = easy_params();
    params.covert_eps = 10.0; // finite so the covert row is present

    const SymbolFrame d = SymbolFrame::random(2, 9);
    WardenChannel warden = unit_warden(1);
    warden.h(0) = cd(0.01, 0.0);

    const Waveform s_ref = initial_waveform(d, params, warden, sc.geometry);
    const ConvexProgram prog = assemble_subproblem(s_ref, sc, params, d, warden);

    // 1 SCNR cut + 2 energy (quad upper + linear lower) + 2 PAPR caps
    // + 2 amplitude minorants + 6 wedge lines + 1 covert + 1 eta sign
    CHECK(prog.num_quadratic() == 2 + 1 + 1);       // PAPR x2, energy upper, covert
    CHECK(prog.num_linear() == 1 + 1 + 2 + 6 + 1);  // cut, energy lower, amp, wedge, eta
    CHECK(prog.num_constraints() == 15);
    CHECK(prog.dimension() == 2 * 2 + 2);
}

TEST_CASE("subproblem is tight at the reference point") {
    const Scenario sc = small_scenario();
    DesignParams params = easy_params();
    const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 10);
    const WardenChannel warden = unit_warden(sc.geometry.num_tx);
    const Waveform s_ref = initial_waveform(d, params, warden, sc.geometry);

    const ConvexProgram prog = assemble_subproblem(s_ref, sc, params, d, warden);

    // at (s_ref, v = min s^H Q s, eta = 0) the SCNR cuts hold with equality
    // at the worst Doppler (surrogate equality at the expansion point)
    double v_min = 1e300;
    std::vector<double> quads;
    for (double f0 : sc.doppler.values) {
        const Eigen::MatrixXcd q = q_matrix(s_ref, f0, sc);
        quads.push_back(std::real(s_ref.dot(q * s_ref)));
        v_min = std::min(v_min, quads.back());
    }
    Eigen::VectorXd x(prog.dimension());
    x.head(2 * sc.geometry.tx_len()) = embed_complex(s_ref);
    x(2 * sc.geometry.tx_len()) = v_min;
    x(2 * sc.geometry.tx_len() + 1) = 0.0;

    double worst_cut = -1e300;
    for (int i = 0; i < prog.num_constraints(); ++i) {
        const double value = prog.constraint_value(i, x);
        CHECK(value <= 1e-9); // the whole stack is feasible at the reference
        if (prog.family(i) == "scnr-cut") worst_cut = std::max(worst_cut, value);
    }
    CHECK(worst_cut == doctest::Approx(0.0).epsilon(1e-9)); // tight cut at argmin

    // unit-modulus reference: energy, PAPR, amplitude, wedge all satisfied
    // with the documented slack structure (d itself is feasible)
    CHECK(phase_error(s_ref, d).max <= 1e-12);
}

TEST_CASE("infeasible references are rejected before solving") {
    const Scenario sc = small_scenario();
    DesignParams params = easy_params();
    const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 11);
    const WardenChannel warden = unit_warden(sc.geometry.num_tx);

    Waveform bad = d.symbols * 3.0; // violates the PAPR cap
    CHECK_THROWS_AS(assemble_subproblem(bad, sc, params, d, warden), std::invalid_argument);
}

TEST_CASE("initial waveform scales toward the covert boundary") {
    const ArrayGeometry geom{2, 2, 4};
    DesignParams params = easy_params();
    params.covert_eps = 0.1;
    const SymbolFrame d = SymbolFrame::random(geom.tx_len(), 12);

    WardenChannel warden = unit_warden(2);
    warden.h(0) = cd(0.1, 0.0); // lhs(d) = 0.04: over budget, scalable

    const double raw = covert_lhs(d.symbols, warden, geom);
    REQUIRE(raw > 2 * 0.1 * 0.1); // the frame itself busts the budget here

    const Waveform s0 = initial_waveform(d, params, warden, geom);
    CHECK(covert_lhs(s0, warden, geom) <= 2 * 0.1 * 0.1 * (1 + 1e-12));
    CHECK(phase_error(s0, d).max <= 1e-12); // scaling preserves phases

    // an impossible budget (eps = 0 against a live channel) is an error
    params.covert_eps = 0.0;
    CHECK_THROWS_AS(initial_waveform(d, params, warden, geom), std::invalid_argument);
}

TEST_CASE("design: clutter-free scalar case reaches the matched bound") {
    Scenario sc;
    sc.geometry = {1, 1, 4};
    sc.target = {0.0, 0, 10.0, ScattererKind::Target};
    sc.doppler.values = {0.0};
    sc.noise.radar_noise_dbm = 0.0;
    sc.noise.warden_noise_dbm = 0.0;

    DesignParams params = easy_params();
    params.phase_tol = pi / 2 - 0.01;

    const SymbolFrame d = SymbolFrame::random(4, 13);
    const WardenChannel warden = unit_warden(1);

    const DesignResult res = design_waveform(sc, params, d, warden);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.trace.rows.size() <= 5);

    const double bound_db =
        to_db(4.0 * sc.target_power_linear() / sc.radar_noise_linear());
    CHECK(res.scnr_db <= bound_db + 0.01);  // never above the matched bound
    CHECK(res.scnr_db >= bound_db - 0.1);   // and within 0.1 dB of it
    CHECK(res.audit.pass);
}

TEST_CASE("design: trace is monotone, deterministic, and audited") {
    const Scenario sc = small_scenario();
    DesignParams params = easy_params();
    params.covert_eps = 0.1;
    const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 14);
    WardenChannel warden = unit_warden(sc.geometry.num_tx);
    warden.h(0) = cd(0.02, 0.01);
    warden.h(1) = cd(-0.015, 0.02);

    const DesignResult res = design_waveform(sc, params, d, warden);
    REQUIRE(res.status == SolveStatus::Optimal);
    REQUIRE(!res.trace.rows.empty());
    for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
        CHECK(res.trace.rows[i].scnr_db >= res.trace.rows[i - 1].scnr_db - 1e-9);
    CHECK(res.audit.pass);
    CHECK(phase_error(res.waveform, d).max <= params.phase_tol + 1e-6);
    CHECK(covert_lhs(res.waveform, warden, sc.geometry) <=
          2 * params.covert_eps * params.covert_eps * (1 + 1e-6));
    CHECK(res.bank.covers(sc.doppler));

    // bit-identical re-run
    const DesignResult again = design_waveform(sc, params, d, warden);
    REQUIRE(again.trace.rows.size() == res.trace.rows.size());
    CHECK((again.waveform - res.waveform).norm() == 0.0);
    for (std::size_t i = 0; i < res.trace.rows.size(); ++i)
        CHECK(again.trace.rows[i].scnr_db == res.trace.rows[i].scnr_db);
}

TEST_CASE("design: warm start from a tighter setting never loses ground") {
    const Scenario sc = small_scenario();
    DesignParams tight = easy_params();
    tight.phase_tol = pi / 12;
    tight.covert_eps = 0.05;
    DesignParams loose = tight;
    loose.phase_tol = pi / 6;
    loose.covert_eps = 0.1;

    const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 15);
    WardenChannel warden = unit_warden(sc.geometry.num_tx);
    warden.h(0) = cd(0.01, -0.02);
    warden.h(1) = cd(0.02, 0.005);

    const DesignResult first = design_waveform(sc, tight, d, warden);
    REQUIRE(first.status == SolveStatus::Optimal);
    const DesignResult second = design_waveform(sc, loose, d, warden, first.waveform);
    REQUIRE(second.status == SolveStatus::Optimal);
    CHECK(second.scnr_db >= first.scnr_db - 1e-9);
}
