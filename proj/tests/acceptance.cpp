// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: end-to-end checks of the designed-waveform toolkit, one
// printed pass/fail line per criterion. Runs the library surfaces directly
// and, for the determinism criterion, the installed CLI binary (path passed
// as argv[1]).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "isac/comms.hpp"
#include "isac/config.hpp"
#include "isac/covert.hpp"
#include "isac/csvio.hpp"
#include "isac/radar.hpp"
#include "isac/rng.hpp"
#include "isac/runner.hpp"
#include "isac/sca.hpp"

using namespace isac;
namespace fs = std::filesystem;
using cd = std::complex<double>;

namespace {

constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------- harness --
struct Criterion {
    std::string name;
    std::function<void(std::string&)> body; // throws or appends failure text
};

bool run_criterion(int index, const Criterion& crit) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
        crit.body(failure);
    } catch (const std::exception& err) {
        failure += std::string("exception: ") + err.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty()) {
        std::printf("[PASS] C%d %s (%.1f s)\n", index, crit.name.c_str(), secs);
        return true;
    }
    std::printf("[FAIL] C%d %s (%.1f s): %s\n", index, crit.name.c_str(), secs,
                failure.c_str());
    return false;
}

void expect(std::string& failure, bool ok, const std::string& what) {
    if (!ok) {
        if (!failure.empty()) failure += "; ";
        failure += what;
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ------------------------------------------------------------- scenarios --
Scenario desk_scenario() {
    Scenario sc;
    sc.geometry = {4, 4, 16};
    sc.target = {0.0, 0, 15.0, ScattererKind::Target};
    sc.clutter = {{-pi / 3, 0, 15.0, ScattererKind::Clutter},
                  {pi / 3, -2, 15.0, ScattererKind::Clutter},
                  {0.0, 2, 15.0, ScattererKind::Clutter}};
    sc.clutter_doppler.offset = {0.0, 0.0, 0.0};
    sc.clutter_doppler.rho = {0.0, 0.0, 0.0};
    sc.doppler.values = {-0.3, -0.15, 0.0, 0.15, 0.3};
    sc.noise.radar_noise_dbm = -90.0;
    sc.noise.warden_noise_dbm = -90.0;
    return sc;
}

DesignParams desk_params() {
    DesignParams p;
    p.papr_cap = 2.0;
    p.amp_floor = 0.5;
    p.phase_tol = pi / 6;
    p.covert_eps = 0.1;
    return p;
}

WardenChannel desk_warden(const Scenario& sc, std::uint64_t seed) {
    WardenChannel ch;
    ch.noise_power = sc.warden_noise_linear();
    const double gain = dbm_to_linear(-132.0);
    StreamRng rng(seed, rng_stream::warden);
    ch.h.resize(sc.geometry.num_tx);
    for (int i = 0; i < sc.geometry.num_tx; ++i) ch.h(i) = rng.cgaussian(gain);
    return ch;
}

Eigen::VectorXcd random_vec(StreamRng& rng, int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cgaussian(1.0);
    return v;
}

Scenario random_scenario(StreamRng& rng, int nt, int nr, int ns, int clutter_count) {
    Scenario sc;
    sc.geometry = {nt, nr, ns};
    sc.target = {(rng.uniform() - 0.5) * 2.8, 0, 12.0, ScattererKind::Target};
    for (int k = 0; k < clutter_count; ++k) {
        Scatterer c;
        c.kind = ScattererKind::Clutter;
        c.angle = (rng.uniform() - 0.5) * 2.8;
        c.delay = int(rng.below(5)) - 2;
        c.power_dbm = 5.0 + 10.0 * rng.uniform();
        sc.clutter.push_back(c);
        sc.clutter_doppler.offset.push_back(wrap_half(rng.uniform() - 0.5));
        sc.clutter_doppler.rho.push_back(0.0);
    }
    sc.doppler.values = {wrap_half(0.8 * (rng.uniform() - 0.5))};
    sc.noise.radar_noise_dbm = 0.0;
    sc.noise.warden_noise_dbm = 0.0;
    sc.validate();
    return sc;
}

Codebook all_qpsk_frames(int len) {
    Codebook cb;
    const int count = 1 << (2 * len);
    for (int word = 0; word < count; ++word) {
        Eigen::VectorXcd s(len);
        for (int e = 0; e < len; ++e)
            s(e) = qpsk_map(static_cast<std::uint8_t>((word >> (2 * e)) & 0x3));
        cb.words.push_back(s);
    }
    return cb;
}

double worst_case_with_matched_filters(const Waveform& s, const Scenario& sc) {
    const double gain = sc.target_power_linear() / sc.radar_noise_linear();
    double lo = 1e300;
    for (double f0 : sc.doppler.values) {
        const Eigen::MatrixXcd q = q_matrix(s, f0, sc);
        lo = std::min(lo, gain * std::real(s.dot(q * s)));
    }
    return lo;
}

// config used by the CLI determinism criterion
const char* cli_config_text = R"(schema = isac-config-v1
scenario.num_tx = 2
scenario.num_rx = 2
scenario.num_slots = 8
scenario.angle_unit = degrees
scenario.target.angle = 0
scenario.target.power_dbm = 10
scenario.clutter.angles = [50, -40]
scenario.clutter.delays = [1, -1]
scenario.clutter.powers_dbm = [10, 10]
scenario.doppler_grid = [-0.2, 0.0, 0.2]
scenario.radar_noise_dbm = 0
scenario.warden_noise_dbm = 0
design.covert_eps = 0.3
warden.gain_db = -25
sweep.xi = [0.3, 0.5]
sweep.eps = [0.1, 0.3]
ser.snr_db = [0, 10, 20]
ser.trials = 5000
seed = 21
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing file " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trace_without_ms(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << "\n";
    return out.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("isacwave_acc_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    std::vector<Criterion> criteria;

    // C1: closed-form filter vs the dominant generalized eigenpair.
    criteria.push_back({"filter optimality vs generalized eigenvalue", [](std::string& f) {
        StreamRng rng(1001, 1);
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const Scenario sc = random_scenario(rng, 2, 2, 4, 2);
            const double f0 = sc.doppler.values.front();
            const Eigen::VectorXcd s = random_vec(rng, sc.geometry.tx_len());
            const double mine = scnr(s, optimal_filter(s, f0, sc), f0, sc);

            const Eigen::VectorXcd t = apply_A(sc.target, f0, sc.geometry, s);
            Eigen::MatrixXcd cov = clutter_covariance(s, f0, sc);
            cov.diagonal().array() += 1.0;
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> geig(
                Eigen::MatrixXcd(t * t.adjoint()), cov);
            const double oracle = sc.target_power_linear() / sc.radar_noise_linear() *
                                  geig.eigenvalues().maxCoeff();
            worst = std::max(worst, std::abs(mine - oracle) / oracle);
        }
        expect(f, worst <= 1e-8, "max relative error " + fmt(worst));
    }});

    // C2: analytic SCNR against the synthesized-echo Monte-Carlo estimate.
    criteria.push_back({"echo-synthesis oracle agreement", [](std::string& f) {
        StreamRng rng(1002, 1);
        double worst_sigma = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Scenario sc = random_scenario(rng, 4, 4, 16, 3);
            const double f0 = sc.doppler.values.front();
            const Eigen::VectorXcd s = random_vec(rng, sc.geometry.tx_len());
            const double analytic = scnr(s, optimal_filter(s, f0, sc), f0, sc);
            const EchoEstimate mc = synthesize_echo(s, f0, sc, 100000, 5000 + trial);
            worst_sigma = std::max(
                worst_sigma, std::abs(mc.scnr_linear - analytic) / (3.0 * mc.std_error));
        }
        expect(f, worst_sigma <= 1.0, "worst deviation " + fmt(worst_sigma) + " x 3SE");
    }});

    // C3: log-sum divergence bound on enumerated QPSK codebooks.
    criteria.push_back({"KL log-sum bound soundness", [](std::string& f) {
        const ArrayGeometry geom{1, 1, 2};
        const Codebook cb = all_qpsk_frames(2);
        StreamRng rng(1003, 1);
        double worst = -1e300;
        for (int draw = 0; draw < 20; ++draw) {
            WardenChannel ch;
            ch.noise_power = 1.0;
            ch.h.resize(1);
            ch.h(0) = rng.cgaussian(0.5);
            const double bound = kl_upper_bound(cb, ch, geom);
            const McEstimate mc = kl_exact_mc(cb, ch, geom, 20000, 7000 + draw);
            worst = std::max(worst, (mc.estimate - bound) / (3.0 * mc.std_error));
        }
        expect(f, worst <= 1.0, "worst excess " + fmt(worst) + " x 3SE");
    }});

    // C4: covertness end to end on designed waveforms.
    criteria.push_back({"covert budget and Pinsker floor on designs", [](std::string& f) {
        Scenario sc;
        sc.geometry = {1, 1, 2};
        sc.target = {0.0, 0, 10.0, ScattererKind::Target};
        sc.clutter = {{0.9, 1, 10.0, ScattererKind::Clutter}};
        sc.clutter_doppler.offset = {0.0};
        sc.clutter_doppler.rho = {0.0};
        sc.doppler.values = {0.0};
        sc.noise.radar_noise_dbm = -90.0;
        sc.noise.warden_noise_dbm = -90.0;

        DesignParams params = desk_params(); // eps = 0.1
        const double budget = 2 * params.covert_eps * params.covert_eps;

        WardenChannel ch;
        ch.noise_power = sc.warden_noise_linear();
        StreamRng hdraw(1004, rng_stream::warden);
        ch.h.resize(1);
        ch.h(0) = hdraw.cgaussian(dbm_to_linear(-110.0));

        // one design per possible frame: the warden-facing codebook
        Codebook designed;
        const Codebook frames = all_qpsk_frames(2);
        for (std::size_t r = 0; r < frames.words.size(); ++r) {
            SymbolFrame d;
            d.symbols = frames.words[r];
            d.bits = {0, 0}; // bits unused by the design
            const DesignResult res = design_waveform(sc, params, d, ch);
            expect(f, res.status == SolveStatus::Optimal,
                   "design " + std::to_string(r) + " status " + to_string(res.status));
            const double lhs = covert_lhs(res.waveform, ch, sc.geometry);
            expect(f, lhs <= budget * (1 + 1e-6),
                   "design " + std::to_string(r) + " covert lhs " + fmt(lhs));
            designed.words.push_back(res.waveform);
        }

        // the desk-scale design obeys its budget too
        const Scenario desk = desk_scenario();
        const WardenChannel wdesk = desk_warden(desk, 1);
        const DesignResult big = design_waveform(
            desk, params, SymbolFrame::random(desk.geometry.tx_len(), 1), wdesk);
        expect(f, big.status == SolveStatus::Optimal, "desk design failed");
        expect(f,
               covert_lhs(big.waveform, wdesk, desk.geometry) <= budget * (1 + 1e-6),
               "desk covert lhs above budget");

        // Willie's empirical error against the Pinsker floor
        const ArrayGeometry geom = sc.geometry;
        const McEstimate kl = kl_exact_mc(designed, ch, geom, 30000, 8001);
        const McEstimate err = simulate_willie(designed, ch, geom, 30000, 8002);
        const double floor = 0.5 - std::sqrt(std::max(kl.estimate, 0.0) / 8.0);
        const double dfloor =
            kl.estimate > 0 ? kl.std_error / (2.0 * std::sqrt(8.0 * kl.estimate)) : 0.0;
        const double se = std::sqrt(err.std_error * err.std_error + dfloor * dfloor);
        expect(f, err.estimate >= floor - 3.0 * se,
               "LRT error " + fmt(err.estimate) + " below floor " + fmt(floor));
    }});

    // C5: convergence and the warm-start sweep at desk scale.
    criteria.push_back({"SCA convergence and warm-start ordering", [](std::string& f) {
        const Scenario sc = desk_scenario();
        DesignParams params = desk_params();
        params.stop_tol_db = 1e-3;
        params.max_outer = 100;
        const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 2);
        const WardenChannel ch = desk_warden(sc, 2);

        const DesignResult res = design_waveform(sc, params, d, ch);
        expect(f, res.status == SolveStatus::Optimal,
               std::string("design status ") + to_string(res.status));
        expect(f, res.trace.rows.size() <= 100, "trace too long");
        for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
            expect(f,
                   res.trace.rows[i].scnr_db >= res.trace.rows[i - 1].scnr_db - 1e-6,
                   "trace decrease at row " + std::to_string(i));
        if (res.trace.rows.size() >= 2) {
            const double last = res.trace.rows.back().scnr_db;
            const double prev = res.trace.rows[res.trace.rows.size() - 2].scnr_db;
            expect(f, std::abs(last - prev) <= params.stop_tol_db,
                   "stop rule not satisfied at termination");
        }

        // warm-start chain over xi x eps, tight to loose
        const std::vector<double> xis = {pi / 12, pi / 6, pi / 4};
        const std::vector<double> epss = {0.05, 0.1, 0.2};
        std::vector<std::vector<double>> scnr(epss.size(),
                                              std::vector<double>(xis.size(), 0.0));
        Waveform first_col_prev;
        for (std::size_t j = 0; j < epss.size(); ++j) {
            Waveform prev_in_row;
            for (std::size_t i = 0; i < xis.size(); ++i) {
                DesignParams p = params;
                p.phase_tol = xis[i];
                p.covert_eps = epss[j];
                std::optional<Waveform> warm;
                if (i > 0) {
                    warm = prev_in_row;
                } else if (j > 0) {
                    warm = first_col_prev;
                }
                const DesignResult point = design_waveform(sc, p, d, ch, warm);
                expect(f, point.status == SolveStatus::Optimal,
                       "sweep point failed at xi=" + fmt(xis[i]) + " eps=" + fmt(epss[j]));
                expect(f, point.trace.rows.size() <= 100, "sweep point trace too long");
                scnr[j][i] = point.scnr_db;
                prev_in_row = point.waveform;
                if (i == 0) first_col_prev = point.waveform;
            }
        }
        for (std::size_t j = 0; j < epss.size(); ++j)
            for (std::size_t i = 1; i < xis.size(); ++i)
                expect(f, scnr[j][i] >= scnr[j][i - 1] - 1e-9,
                       "xi chain decrease at eps=" + fmt(epss[j]));
        for (std::size_t j = 1; j < epss.size(); ++j)
            expect(f, scnr[j][0] >= scnr[j - 1][0] - 1e-9,
                   "eps chain decrease at xi=" + fmt(xis[0]));
    }});

    // C6: communication quality of designed waveforms.
    criteria.push_back({"phase audit and symbol error behavior", [](std::string& f) {
        // saturated regime: phase distortion capped by xi, SER monotone
        const Scenario sc = desk_scenario();
        const DesignParams params = desk_params(); // xi = pi/6, floor 0.5
        const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 3);
        const WardenChannel ch = desk_warden(sc, 3);
        const DesignResult res = design_waveform(sc, params, d, ch);
        expect(f, res.status == SolveStatus::Optimal, "desk design failed");
        expect(f, phase_error(res.waveform, d).max <= params.phase_tol + 1e-6,
               "phase audit exceeded xi");

        double prev = 1.0, prev_se = 0.0;
        for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
            const SerEstimate est = simulate_ser(res.waveform, d, snr, 20000, 9000);
            expect(f, est.ser <= prev + 3.0 * (est.std_error + prev_se),
                   "SER not monotone at " + fmt(snr) + " dB");
            prev = est.ser;
            prev_se = est.std_error;
        }

        // margin regime: a design that keeps phase slack decodes cleanly
        Scenario margin;
        margin.geometry = {1, 2, 64};
        margin.target = {0.0, 0, 10.0, ScattererKind::Target};
        margin.clutter = {{0.9, 1, -100.0, ScattererKind::Clutter}};
        margin.clutter_doppler.offset = {0.0};
        margin.clutter_doppler.rho = {0.0};
        margin.doppler.values = {0.0};
        margin.noise.radar_noise_dbm = -90.0;
        margin.noise.warden_noise_dbm = -90.0;
        DesignParams mp = desk_params();
        WardenChannel mch;
        mch.noise_power = margin.warden_noise_linear();
        StreamRng hdraw(1006, rng_stream::warden);
        mch.h.resize(1);
        mch.h(0) = hdraw.cgaussian(dbm_to_linear(-140.0));
        const SymbolFrame md = SymbolFrame::random(margin.geometry.tx_len(), 4);
        const DesignResult mres = design_waveform(margin, mp, md, mch);
        expect(f, mres.status == SolveStatus::Optimal, "margin design failed");
        expect(f, phase_error(mres.waveform, md).max <= mp.phase_tol + 1e-6,
               "margin phase audit exceeded xi");
        const SerEstimate clean = simulate_ser(mres.waveform, md, 20.0, 100000, 9001);
        expect(f, clean.ser == 0.0,
               "SER at 20 dB was " + fmt(clean.ser) + " over " +
                   std::to_string(clean.observations) + " observations");
    }});

    // C7: Doppler robustness of the grid-robust design.
    criteria.push_back({"robust design beats the single-point design", [](std::string& f) {
        StreamRng rng(1007, 1);
        std::vector<double> grid;
        for (int k = 0; k < 16; ++k) grid.push_back(-0.375 + 0.05 * k);
        for (int trial = 0; trial < 5; ++trial) {
            Scenario sc = random_scenario(rng, 4, 4, 16, 3);
            sc.noise.radar_noise_dbm = -90.0;
            sc.noise.warden_noise_dbm = -90.0;
            for (auto& c : sc.clutter) c.power_dbm = 15.0;
            sc.target.power_dbm = 15.0;

            Scenario robust = sc;
            robust.doppler.values = grid;
            Scenario single = sc;
            single.doppler.values = {0.0};

            DesignParams params = desk_params();
            const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 100 + trial);
            const WardenChannel ch = desk_warden(sc, 100 + trial);

            const DesignResult rres = design_waveform(robust, params, d, ch);
            const DesignResult sres = design_waveform(single, params, d, ch);
            expect(f, rres.status == SolveStatus::Optimal, "robust design failed");
            expect(f, sres.status == SolveStatus::Optimal, "single design failed");

            const double wc_robust = worst_case_with_matched_filters(rres.waveform, robust);
            const double wc_single = worst_case_with_matched_filters(sres.waveform, robust);
            expect(f, wc_robust >= wc_single * (1 - 1e-9),
                   "trial " + std::to_string(trial) + ": robust " + fmt(to_db(wc_robust)) +
                       " dB < single " + fmt(to_db(wc_single)) + " dB");
        }
    }});

    // C8: direct constraint audit of the finished desk design.
    criteria.push_back({"constraint audit by direct evaluation", [](std::string& f) {
        const Scenario sc = desk_scenario();
        const DesignParams params = desk_params();
        const SymbolFrame d = SymbolFrame::random(sc.geometry.tx_len(), 5);
        const WardenChannel ch = desk_warden(sc, 5);
        const DesignResult res = design_waveform(sc, params, d, ch);
        expect(f, res.status == SolveStatus::Optimal, "design failed");

        const Waveform& s = res.waveform;
        for (int t = 0; t < sc.geometry.num_tx; ++t) {
            double energy = 0.0;
            for (int n = 0; n < sc.geometry.num_slots; ++n)
                energy += std::norm(s(n * sc.geometry.num_tx + t));
            expect(f,
                   std::abs(energy - sc.geometry.num_slots) <=
                       res.eta + 1e-6 * sc.geometry.num_slots,
                   "antenna " + std::to_string(t) + " energy slack " +
                       fmt(std::abs(energy - sc.geometry.num_slots)) + " vs eta " +
                       fmt(res.eta));
        }
        double max_pow = 0.0, min_amp = 1e300;
        for (Eigen::Index e = 0; e < s.size(); ++e) {
            max_pow = std::max(max_pow, std::norm(s(e)));
            min_amp = std::min(min_amp, std::abs(s(e)));
        }
        expect(f, max_pow <= params.papr_cap * (1 + 1e-6),
               "PAPR " + fmt(max_pow) + " above cap");
        expect(f, min_amp >= params.amp_floor - 1e-6,
               "amplitude " + fmt(min_amp) + " below floor");
        expect(f, res.audit.pass, "library audit disagrees");
    }});

    // C9: byte-identical artifacts for identical config + seed, via the CLI.
    criteria.push_back({"deterministic artifacts through the CLI", [&cli](std::string& f) {
        expect(f, !cli.empty(), "CLI binary path missing (argv[1])");
        if (cli.empty()) return;
        const fs::path cfg_path = fs::temp_directory_path() / "isacwave_acc_cli.cfg";
        std::ofstream(cfg_path) << cli_config_text;

        const fs::path a = fresh_dir("cli_a"), b = fresh_dir("cli_b");
        const auto run = [&](const std::string& sub, const fs::path& out,
                             const std::string& extra) {
            const std::string cmd = cli + " " + sub + " --config " + cfg_path.string() +
                                    " --out " + out.string() + extra + " 2>/dev/null";
            return std::system(cmd.c_str());
        };
        expect(f, run("design", a, "") == 0, "design run A failed");
        expect(f, run("design", b, "") == 0, "design run B failed");
        for (const char* name : {"waveform.csv", "filterbank.csv", "audit.csv"})
            expect(f, slurp(a / name) == slurp(b / name),
                   std::string(name) + " differs between identical runs");
        expect(f, trace_without_ms(a / "trace.csv") == trace_without_ms(b / "trace.csv"),
               "trace.csv differs beyond the wall-time column");

        const std::string reuse_a = " --waveform " + (a / "waveform.csv").string();
        const std::string reuse_b = " --waveform " + (b / "waveform.csv").string();
        expect(f, run("doppler", a, reuse_a) == 0, "doppler run A failed");
        expect(f, run("doppler", b, reuse_b) == 0, "doppler run B failed");
        expect(f, slurp(a / "doppler.csv") == slurp(b / "doppler.csv"),
               "doppler.csv differs");
        expect(f, run("ser", a, reuse_a) == 0, "ser run A failed");
        expect(f, run("ser", b, reuse_b) == 0, "ser run B failed");
        expect(f, slurp(a / "ser.csv") == slurp(b / "ser.csv"), "ser.csv differs");
        expect(f, run("sweep", a, "") == 0, "sweep run A failed");
        expect(f, run("sweep", b, "") == 0, "sweep run B failed");
        expect(f, slurp(a / "sweep.csv") == slurp(b / "sweep.csv"), "sweep.csv differs");
        expect(f, run("verify", a, " --seed 5") == 0, "verify run A failed");
        expect(f, run("verify", b, " --seed 5") == 0, "verify run B failed");
        expect(f, slurp(a / "verify.csv") == slurp(b / "verify.csv"),
               "verify.csv differs");
    }});

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
        if (!run_criterion(static_cast<int>(i) + 1, criteria[i])) ++failures;
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
}
