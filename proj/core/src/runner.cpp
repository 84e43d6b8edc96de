// SPDX-License-Identifier: Apache-2.0

#include "isac/runner.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "isac/csvio.hpp"
#include "isac/log.hpp"
#include "isac/radar.hpp"
#include "isac/rng.hpp"
#include "isac/sca.hpp"

namespace isac {

namespace {

std::uint64_t effective_seed(const ExperimentConfig& cfg, const RunOptions& opts) {
    return opts.seed_override.value_or(cfg.seed);
}

int status_exit_code(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return exit_code::ok;
        case SolveStatus::IterationLimit: return exit_code::iteration_limit;
        case SolveStatus::Infeasible: return exit_code::infeasible;
        case SolveStatus::NumericalFailure: return exit_code::numerical_failure;
    }
    return exit_code::numerical_failure;
}

void write_waveform(const std::filesystem::path& path, const Waveform& s) {
    CsvWriter csv(path, "isac-waveform-v1", {"index", "re", "im"});
    for (Eigen::Index i = 0; i < s.size(); ++i)
        csv.row({std::to_string(i), fmt_exact(s(i).real()), fmt_exact(s(i).imag())});
    csv.commit();
}

void write_filterbank(const std::filesystem::path& path, const FilterBank& bank) {
    CsvWriter csv(path, "isac-filterbank-v1", {"f0", "index", "re", "im"});
    for (std::size_t k = 0; k < bank.dopplers.size(); ++k)
        for (Eigen::Index i = 0; i < bank.filters[k].size(); ++i)
            csv.row({fmt_exact(bank.dopplers[k]), std::to_string(i),
                     fmt_exact(bank.filters[k](i).real()), fmt_exact(bank.filters[k](i).imag())});
    csv.commit();
}

void write_trace(const std::filesystem::path& path, const ConvergenceTrace& trace) {
    CsvWriter csv(path, "isac-trace-v1", {"iter", "scnr_db", "v", "eta", "status", "ms"});
    for (const IterationRecord& r : trace.rows)
        csv.row({std::to_string(r.iter), fmt_metric(r.scnr_db), fmt_metric(r.v),
                 fmt_metric(r.eta), to_string(r.status), fmt_metric(r.ms)});
    csv.commit();
}

void write_audit(const std::filesystem::path& path, const AuditReport& report) {
    CsvWriter csv(path, "isac-audit-v1", {"metric", "value", "threshold", "op", "pass"});
    for (const AuditRow& r : report.rows)
        csv.row({r.metric, fmt_metric(r.value), fmt_metric(r.threshold),
                 r.upper_bound ? "<=" : ">=", r.pass ? "1" : "0"});
    csv.commit();
}

}  // namespace

int run_design(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::uint64_t seed = effective_seed(cfg, opts);
    const SymbolFrame d = cfg.make_symbols(seed);
    const WardenChannel warden = cfg.make_warden(seed);

    const DesignResult res =
        design_waveform(cfg.scenario, cfg.params, d, warden, std::nullopt, opts.jobs);
    write_trace(opts.out_dir / "trace.csv", res.trace);

    if (res.status != SolveStatus::Optimal && res.status != SolveStatus::IterationLimit) {
        log_error("design: " + res.message);
        return status_exit_code(res.status);
    }

    write_waveform(opts.out_dir / "waveform.csv", res.waveform);
    write_filterbank(opts.out_dir / "filterbank.csv", res.bank);
    write_audit(opts.out_dir / "audit.csv", res.audit);
    log_info("design: worst-case SCNR " + fmt_metric(res.scnr_db) + " dB at f0 " +
             fmt_metric(res.worst_doppler) + ", status " + to_string(res.status));

    if (!res.audit.pass) {
        log_error("design: constraint audit failed, see audit.csv");
        return exit_code::audit_failed;
    }
    return status_exit_code(res.status);
}

int run_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::uint64_t seed = effective_seed(cfg, opts);
    const SymbolFrame d = cfg.make_symbols(seed);
    const WardenChannel warden = cfg.make_warden(seed);

    std::vector<std::string> header = {"xi", "eps", "scnr_db", "iters", "status"};
    for (double snr : cfg.ser_snr_db) {
        header.push_back("ser@" + fmt_metric(snr));
        header.push_back("se@" + fmt_metric(snr));
    }
    CsvWriter csv(opts.out_dir / "sweep.csv", "isac-sweep-v1", header);

    const std::size_t nx = cfg.sweep_xi.size();
    // Warm starts flow from tighter to looser settings: along the xi axis
    // within each eps row, and from the first point of the previous eps row.
    std::vector<Waveform> row_prev_first;
    for (std::size_t j = 0; j < cfg.sweep_eps.size(); ++j) {
        Waveform prev_in_row;
        for (std::size_t i = 0; i < nx; ++i) {
            DesignParams params = cfg.params;
            params.phase_tol = cfg.sweep_xi[i];
            params.covert_eps = cfg.sweep_eps[j];

            std::optional<Waveform> warm;
            if (i > 0 && prev_in_row.size() > 0) {
                warm = prev_in_row;
            } else if (j > 0 && !row_prev_first.empty() && row_prev_first.back().size() > 0) {
                warm = row_prev_first.back();
            }

            std::vector<std::string> fields = {fmt_metric(params.phase_tol),
                                               fmt_metric(params.covert_eps)};
            try {
                const DesignResult res =
                    design_waveform(cfg.scenario, params, d, warden, warm, opts.jobs);
                if (res.status == SolveStatus::Optimal ||
                    res.status == SolveStatus::IterationLimit) {
                    fields.push_back(fmt_metric(res.scnr_db));
                    fields.push_back(std::to_string(res.trace.rows.size()));
                    fields.push_back(to_string(res.status));
                    for (double snr : cfg.ser_snr_db) {
                        const SerEstimate ser =
                            simulate_ser(res.waveform, d, snr, cfg.ser_trials, seed);
                        fields.push_back(fmt_metric(ser.ser));
                        fields.push_back(fmt_metric(ser.std_error));
                    }
                    prev_in_row = res.waveform;
                    if (i == 0) row_prev_first.push_back(res.waveform);
                } else {
                    log_warn("sweep: point xi=" + fmt_metric(params.phase_tol) +
                             " eps=" + fmt_metric(params.covert_eps) + " failed: " + res.message);
                    fields.push_back("nan");
                    fields.push_back(std::to_string(res.trace.rows.size()));
                    fields.push_back(to_string(res.status));
                    for (std::size_t k = 0; k < cfg.ser_snr_db.size(); ++k) {
                        fields.push_back("nan");
                        fields.push_back("nan");
                    }
                    prev_in_row.resize(0);
                    if (i == 0) row_prev_first.emplace_back();
                }
            } catch (const std::exception& err) {
                log_warn(std::string("sweep: point failed: ") + err.what());
                fields.push_back("nan");
                fields.push_back("0");
                fields.push_back("error");
                for (std::size_t k = 0; k < cfg.ser_snr_db.size(); ++k) {
                    fields.push_back("nan");
                    fields.push_back("nan");
                }
                prev_in_row.resize(0);
                if (i == 0) row_prev_first.emplace_back();
            }
            csv.row(fields);
        }
    }
    csv.commit();
    return exit_code::ok;
}

namespace {

// Waveform for evaluation runs: reuse an artifact or design inline.
int obtain_waveform(const ExperimentConfig& cfg, const RunOptions& opts, Waveform& out) {
    if (opts.waveform_in) {
        out = read_waveform_csv(*opts.waveform_in);
        if (out.size() != cfg.scenario.geometry.tx_len())
            throw std::runtime_error("waveform artifact length does not match the scenario");
        return exit_code::ok;
    }
    const std::uint64_t seed = effective_seed(cfg, opts);
    const DesignResult res = design_waveform(cfg.scenario, cfg.params, cfg.make_symbols(seed),
                                             cfg.make_warden(seed), std::nullopt, opts.jobs);
    if (res.status != SolveStatus::Optimal && res.status != SolveStatus::IterationLimit) {
        log_error("inline design failed: " + res.message);
        return status_exit_code(res.status);
    }
    out = res.waveform;
    return exit_code::ok;
}

}  // namespace

int run_doppler(const ExperimentConfig& cfg, const RunOptions& opts) {
    Waveform s;
    const int rc = obtain_waveform(cfg, opts, s);
    if (rc != exit_code::ok) return rc;

    const FilterBank bank = matched_filter_bank(s, cfg.scenario, opts.jobs);
    CsvWriter csv(opts.out_dir / "doppler.csv", "isac-doppler-v1", {"f0", "scnr_db"});
    for (std::size_t k = 0; k < bank.dopplers.size(); ++k) {
        const double value = scnr(s, bank.filters[k], bank.dopplers[k], cfg.scenario);
        csv.row({fmt_exact(bank.dopplers[k]), fmt_metric(to_db(value))});
    }
    csv.commit();
    return exit_code::ok;
}

int run_ser(const ExperimentConfig& cfg, const RunOptions& opts) {
    Waveform s;
    const int rc = obtain_waveform(cfg, opts, s);
    if (rc != exit_code::ok) return rc;

    const std::uint64_t seed = effective_seed(cfg, opts);
    const SymbolFrame d = cfg.make_symbols(seed);
    CsvWriter csv(opts.out_dir / "ser.csv", "isac-ser-v1",
                  {"xi", "eps", "snr_db", "ser", "se", "trials"});
    for (double snr : cfg.ser_snr_db) {
        const SerEstimate est = simulate_ser(s, d, snr, cfg.ser_trials, seed);
        csv.row({fmt_metric(cfg.params.phase_tol), fmt_metric(cfg.params.covert_eps),
                 fmt_metric(snr), fmt_metric(est.ser), fmt_metric(est.std_error),
                 std::to_string(cfg.ser_trials)});
    }
    csv.commit();
    return exit_code::ok;
}

// ---------------------------------------------------------------------------
// verify: oracle cross-checks
// ---------------------------------------------------------------------------

namespace {

Scenario random_small_scenario(StreamRng& rng, int num_tx, int num_rx, int num_slots,
                               int num_clutter) {
    Scenario sc;
    sc.geometry = {num_tx, num_rx, num_slots};
    sc.target.kind = ScattererKind::Target;
    sc.target.angle = (rng.uniform() - 0.5) * 2.8; // keep away from the +-pi/2 edge
    sc.target.delay = 0;
    sc.target.power_dbm = 10.0;
    for (int k = 0; k < num_clutter; ++k) {
        Scatterer c;
        c.kind = ScattererKind::Clutter;
        c.angle = (rng.uniform() - 0.5) * 2.8;
        c.delay = static_cast<int>(rng.below(2 * std::min(num_slots - 1, 2) + 1)) -
                  std::min(num_slots - 1, 2);
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

Eigen::VectorXcd random_waveform(StreamRng& rng, int len) {
    Eigen::VectorXcd s(len);
    for (int i = 0; i < len; ++i) s(i) = rng.cgaussian(1.0);
    return s;
}

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// Closed-form filter against the dominant generalized eigenpair of the
// target rank-one form and the interference covariance.
void check_filter(StreamRng& rng, FaultInjection fault, std::vector<VerifyCheck>& checks) {
    double worst_distortion = 0.0;
    double worst_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Scenario sc = random_small_scenario(rng, 2, 2, 4, 2);
        const double f0 = sc.doppler.values.front();
        const Eigen::VectorXcd s = random_waveform(rng, sc.geometry.tx_len());

        Eigen::VectorXcd w = optimal_filter(s, f0, sc);
        if (fault == FaultInjection::NegateFilter) w = -w;

        const Eigen::VectorXcd target = apply_A(sc.target, f0, sc.geometry, s);
        worst_distortion = std::max(worst_distortion, std::abs(w.dot(target) - 1.0));

        const double gain = sc.target_power_linear() / sc.radar_noise_linear();
        Eigen::MatrixXcd cov = clutter_covariance(s, f0, sc);
        cov.diagonal().array() += 1.0;
        const Eigen::MatrixXcd rank1 = target * target.adjoint();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> geig(rank1, cov);
        const double best = gain * geig.eigenvalues().maxCoeff();
        const double mine = scnr(s, w, f0, sc);
        worst_rel = std::max(worst_rel, std::abs(mine - best) / std::abs(best));
    }
    checks.push_back({"filter_distortionless", worst_distortion, 1e-10,
                      worst_distortion <= 1e-10});
    checks.push_back({"filter_geneig_rel_err", worst_rel, 1e-8, worst_rel <= 1e-8});
}

void check_echo(StreamRng& rng, int draws, std::uint64_t seed,
                std::vector<VerifyCheck>& checks) {
    double worst_sigma = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const Scenario sc = random_small_scenario(rng, 4, 4, 16, 3);
        const double f0 = sc.doppler.values.front();
        const Eigen::VectorXcd s = random_waveform(rng, sc.geometry.tx_len());
        const double analytic = scnr(s, optimal_filter(s, f0, sc), f0, sc);
        const EchoEstimate mc = synthesize_echo(s, f0, sc, draws, seed + trial);
        worst_sigma = std::max(worst_sigma,
                               std::abs(mc.scnr_linear - analytic) / (3.0 * mc.std_error));
    }
    checks.push_back({"echo_mc_3sigma", worst_sigma, 1.0, worst_sigma <= 1.0});
}

Codebook qpsk_codebook(int len) {
    // All QPSK frames of the given length (4^len words).
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

void check_covert(StreamRng& rng, const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::filesystem::path& out_dir, std::vector<VerifyCheck>& checks) {
    const ArrayGeometry geom{1, 1, 2};
    const Codebook cb = qpsk_codebook(geom.tx_len());

    CsvWriter audit(out_dir / "willie_audit.csv", "isac-willie-audit-v1",
                    {"codebook_id", "kl_bound", "kl_mc", "kl_mc_se", "lrt_error",
                     "pinsker_floor"});
    double worst_kl = -1e300, worst_pinsker = -1e300;
    for (int draw = 0; draw < 5; ++draw) {
        WardenChannel ch;
        ch.noise_power = 1.0;
        ch.h.resize(1);
        ch.h(0) = rng.cgaussian(0.25);

        const double bound = kl_upper_bound(cb, ch, geom);
        const McEstimate kl = kl_exact_mc(cb, ch, geom, cfg.kl_samples, seed + draw);
        const McEstimate err = simulate_willie(cb, ch, geom, cfg.lrt_trials, seed + 100 + draw);
        const double floor = 0.5 - std::sqrt(std::max(kl.estimate, 0.0) / 8.0);
        audit.row({std::to_string(draw), fmt_metric(bound), fmt_metric(kl.estimate),
                   fmt_metric(kl.std_error), fmt_metric(err.estimate), fmt_metric(floor)});

        worst_kl = std::max(worst_kl, (kl.estimate - bound) / (3.0 * kl.std_error));
        const double dfloor =
            kl.estimate > 0.0 ? kl.std_error / (2.0 * std::sqrt(8.0 * kl.estimate)) : 0.0;
        const double se = std::sqrt(err.std_error * err.std_error + dfloor * dfloor);
        worst_pinsker = std::max(worst_pinsker, (floor - err.estimate) / (3.0 * se));
    }
    audit.commit();
    checks.push_back({"kl_bound_3sigma", worst_kl, 1.0, worst_kl <= 1.0});
    checks.push_back({"pinsker_3sigma", worst_pinsker, 1.0, worst_pinsker <= 1.0});
}

void check_minorant(StreamRng& rng, std::vector<VerifyCheck>& checks) {
    double worst = -1e300;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        Eigen::MatrixXcd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian(1.0);
        const Eigen::MatrixXcd m = g * g.adjoint() / double(n);
        const Eigen::VectorXcd s_ref = random_waveform(rng, n);
        const AffineMinorant cut = linearize_minorant(m, s_ref);
        for (int k = 0; k < 200; ++k) {
            const Eigen::VectorXcd s = random_waveform(rng, n);
            const double quad = std::real(s.dot(m * s));
            worst = std::max(worst, (cut.eval(s) - quad) / std::max(1.0, std::abs(quad)));
        }
    }
    checks.push_back({"minorant_domination", worst, 1e-9, worst <= 1e-9});
}

}  // namespace

int run_verify(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::uint64_t seed = effective_seed(cfg, opts);
    StreamRng rng(seed, rng_stream::verify);

    std::vector<VerifyCheck> checks;
    check_filter(rng, opts.fault, checks);
    check_echo(rng, cfg.echo_draws, seed, checks);
    check_covert(rng, cfg, seed, opts.out_dir, checks);
    check_minorant(rng, checks);

    CsvWriter csv(opts.out_dir / "verify.csv", "isac-verify-v1",
                  {"check", "value", "bound", "pass"});
    bool all_pass = true;
    for (const VerifyCheck& c : checks) {
        csv.row({c.name, fmt_metric(c.value), fmt_metric(c.bound), c.pass ? "1" : "0"});
        if (!c.pass) {
            all_pass = false;
            log_error("verify: check '" + c.name + "' failed (" + fmt_metric(c.value) +
                      " vs bound " + fmt_metric(c.bound) + ")");
        }
    }
    csv.commit();
    return all_pass ? exit_code::ok : exit_code::verify_failed;
}

}  // namespace isac
