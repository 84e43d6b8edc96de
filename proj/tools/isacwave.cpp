// SPDX-License-Identifier: Apache-2.0
//
// isacwave: joint waveform / receive-filter design for a covert ISAC system,
// plus the simulation harness that evaluates the result. Subcommands:
//   design   solve one configuration, emit waveform/filterbank/trace/audit
//   sweep    warm-started designs over the xi x eps grid
//   doppler  SCNR across the Doppler grid for a designed waveform
//   ser      symbol-error-rate evaluation at Bob
//   verify   oracle cross-checks of the analytic machinery

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "isac/config.hpp"
#include "isac/log.hpp"
#include "isac/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    bool desk_scale = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* config = cmd->add_option("--config", args.config_path, "experiment config file");
    if (config_required) config->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: out)");
    cmd->add_option("--seed", args.seed, "override the config seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--jobs", args.jobs, "worker threads for independent grid points")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--desk-scale", args.desk_scale,
                  "override the geometry to N_T=4, N_R=4, N=16");
}

isac::ExperimentConfig make_config(const CommonArgs& args) {
    isac::ExperimentConfig cfg;
    if (!args.config_path.empty()) {
        cfg = isac::load_config(args.config_path);
    } else {
        // Built-in default used by `verify` when no config is given.
        cfg.scenario.geometry = {2, 2, 8};
        cfg.scenario.target.kind = isac::ScattererKind::Target;
        cfg.scenario.target.power_dbm = 10.0;
        isac::Scatterer c;
        c.kind = isac::ScattererKind::Clutter;
        c.angle = 0.8;
        c.power_dbm = 10.0;
        cfg.scenario.clutter = {c};
        cfg.scenario.clutter_doppler.offset = {0.0};
        cfg.scenario.clutter_doppler.rho = {0.0};
        cfg.scenario.doppler.values = {0.0};
        cfg.scenario.noise.radar_noise_dbm = 0.0;
        cfg.scenario.noise.warden_noise_dbm = 0.0;
        cfg.seed = 1;
    }
    if (args.desk_scale) isac::apply_desk_scale(cfg);
    return cfg;
}

isac::RunOptions make_options(const CommonArgs& args) {
    isac::RunOptions opts;
    opts.out_dir = args.out_dir;
    if (args.seed_set) opts.seed_override = args.seed;
    opts.jobs = args.jobs;
    return opts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covert ISAC waveform design and evaluation"};
    app.require_subcommand(1);

    CommonArgs design_args, sweep_args, doppler_args, ser_args, verify_args;
    std::string doppler_waveform, ser_waveform, fault_name;

    CLI::App* design = app.add_subcommand("design", "design one waveform");
    add_common(design, design_args, true);

    CLI::App* sweep = app.add_subcommand("sweep", "designs across the xi/eps grid");
    add_common(sweep, sweep_args, true);

    CLI::App* doppler = app.add_subcommand("doppler", "SCNR across the Doppler grid");
    add_common(doppler, doppler_args, true);
    doppler->add_option("--waveform", doppler_waveform,
                        "reuse a waveform.csv artifact instead of designing inline");

    CLI::App* ser = app.add_subcommand("ser", "symbol error rate at Bob");
    add_common(ser, ser_args, true);
    ser->add_option("--waveform", ser_waveform,
                    "reuse a waveform.csv artifact instead of designing inline");

    CLI::App* verify = app.add_subcommand("verify", "run the oracle cross-check suite");
    add_common(verify, verify_args, false);
    verify->add_option("--inject-fault", fault_name,
                       "corrupt an internal quantity to exercise the failure path "
                       "(negate-filter)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) {
            return isac::run_design(make_config(design_args), make_options(design_args));
        }
        if (sweep->parsed()) {
            return isac::run_sweep(make_config(sweep_args), make_options(sweep_args));
        }
        if (doppler->parsed()) {
            isac::RunOptions opts = make_options(doppler_args);
            if (!doppler_waveform.empty()) opts.waveform_in = doppler_waveform;
            return isac::run_doppler(make_config(doppler_args), opts);
        }
        if (ser->parsed()) {
            isac::RunOptions opts = make_options(ser_args);
            if (!ser_waveform.empty()) opts.waveform_in = ser_waveform;
            return isac::run_ser(make_config(ser_args), opts);
        }
        if (verify->parsed()) {
            isac::RunOptions opts = make_options(verify_args);
            if (fault_name == "negate-filter") {
                opts.fault = isac::FaultInjection::NegateFilter;
            } else if (!fault_name.empty()) {
                std::fprintf(stderr, "unknown fault '%s'\n", fault_name.c_str());
                return isac::exit_code::config_error;
            }
            return isac::run_verify(make_config(verify_args), opts);
        }
    } catch (const isac::ConfigError& err) {
        std::fprintf(stderr, "%s\n", err.what());
        return isac::exit_code::config_error;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return isac::exit_code::config_error;
    }
    return isac::exit_code::config_error;
}
