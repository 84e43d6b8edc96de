// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isac/sca.hpp"

namespace {

struct DeskSetup {
    isac::Scenario scenario;
    isac::DesignParams params;
    isac::SymbolFrame frame;
    isac::WardenChannel warden;
    isac::Waveform reference;
};

DeskSetup desk_setup() {
    DeskSetup setup;
    setup.scenario.geometry = {4, 4, 16};
    setup.scenario.target = {0.0, 0, 15.0, isac::ScattererKind::Target};
    setup.scenario.clutter = {{-1.0472, 0, 15.0, isac::ScattererKind::Clutter},
                              {1.0472, -2, 15.0, isac::ScattererKind::Clutter},
                              {0.0, 2, 15.0, isac::ScattererKind::Clutter}};
    setup.scenario.clutter_doppler.offset = {0.0, 0.0, 0.0};
    setup.scenario.clutter_doppler.rho = {0.0, 0.0, 0.0};
    setup.scenario.doppler.values = {-0.3, -0.15, 0.0, 0.15, 0.3};
    setup.scenario.noise.radar_noise_dbm = -90.0;
    setup.scenario.noise.warden_noise_dbm = -90.0;

    setup.params.covert_eps = 0.1;
    setup.frame = isac::SymbolFrame::random(setup.scenario.geometry.tx_len(), 11);
    setup.warden.noise_power = setup.scenario.warden_noise_linear();
    setup.warden.h = 1e-7 * Eigen::VectorXcd::Ones(4);
    setup.reference = isac::initial_waveform(setup.frame, setup.params, setup.warden,
                                             setup.scenario.geometry);
    return setup;
}

void AssembleSubproblem(benchmark::State& state) {
    const DeskSetup setup = desk_setup();
    for (auto _ : state) {
        auto prog = isac::assemble_subproblem(setup.reference, setup.scenario,
                                              setup.params, setup.frame, setup.warden);
        benchmark::DoNotOptimize(prog);
    }
}
BENCHMARK(AssembleSubproblem);

void SolveSubproblem(benchmark::State& state) {
    const DeskSetup setup = desk_setup();
    const isac::ConvexProgram prog = isac::assemble_subproblem(
        setup.reference, setup.scenario, setup.params, setup.frame, setup.warden);
    for (auto _ : state) {
        auto sol = isac::solve(prog);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(SolveSubproblem);

void FullDesign(benchmark::State& state) {
    const DeskSetup setup = desk_setup();
    for (auto _ : state) {
        auto res = isac::design_waveform(setup.scenario, setup.params, setup.frame,
                                         setup.warden);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(FullDesign)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
