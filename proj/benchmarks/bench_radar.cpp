// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isac/radar.hpp"
#include "isac/rng.hpp"

namespace {

isac::Scenario scenario_for(int nt, int nr, int ns) {
    isac::Scenario sc;
    sc.geometry = {nt, nr, ns};
    sc.target = {0.0, 0, 15.0, isac::ScattererKind::Target};
    sc.clutter = {{-1.0472, 0, 15.0, isac::ScattererKind::Clutter},
                  {1.0472, -2, 15.0, isac::ScattererKind::Clutter},
                  {0.0, 2, 15.0, isac::ScattererKind::Clutter}};
    sc.clutter_doppler.offset = {0.0, 0.0, 0.0};
    sc.clutter_doppler.rho = {0.0, 0.0, 0.0};
    sc.doppler.values = {0.0};
    sc.noise.radar_noise_dbm = -90.0;
    sc.noise.warden_noise_dbm = -90.0;
    return sc;
}

Eigen::VectorXcd waveform_for(const isac::Scenario& sc) {
    isac::StreamRng rng(1, 1);
    Eigen::VectorXcd s(sc.geometry.tx_len());
    for (int i = 0; i < s.size(); ++i) s(i) = rng.cgaussian(1.0);
    return s;
}

void ApplyResponse(benchmark::State& state) {
    const isac::Scenario sc = scenario_for(int(state.range(0)), int(state.range(0)), 32);
    const Eigen::VectorXcd s = waveform_for(sc);
    for (auto _ : state) {
        auto y = isac::apply_A(sc.target, 0.25, sc.geometry, s);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(ApplyResponse)->Arg(4)->Arg(8);

void ClutterCovariance(benchmark::State& state) {
    const isac::Scenario sc = scenario_for(int(state.range(0)), int(state.range(0)), 32);
    const Eigen::VectorXcd s = waveform_for(sc);
    for (auto _ : state) {
        auto psi = isac::clutter_covariance(s, 0.1, sc);
        benchmark::DoNotOptimize(psi);
    }
}
BENCHMARK(ClutterCovariance)->Arg(4)->Arg(8);

void OptimalFilter(benchmark::State& state) {
    const isac::Scenario sc = scenario_for(int(state.range(0)), int(state.range(0)), 32);
    const Eigen::VectorXcd s = waveform_for(sc);
    for (auto _ : state) {
        auto w = isac::optimal_filter(s, 0.1, sc);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(OptimalFilter)->Arg(4)->Arg(8);

void EchoSynthesis(benchmark::State& state) {
    const isac::Scenario sc = scenario_for(4, 4, 16);
    const Eigen::VectorXcd s = waveform_for(sc);
    for (auto _ : state) {
        auto est = isac::synthesize_echo(s, 0.0, sc, int(state.range(0)), 7);
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(EchoSynthesis)->Arg(1000)->Arg(10000);

}  // namespace
