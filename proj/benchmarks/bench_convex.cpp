// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "isac/convex.hpp"
#include "isac/rng.hpp"

namespace {

// Ball-constrained linear program of the same flavor the design loop emits.
isac::ConvexProgram ball_program(int n, int m) {
    isac::StreamRng rng(3, 1);
    isac::ConvexProgram prog(n);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = rng.gaussian();
    prog.set_objective(c);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd center(n);
        for (int i = 0; i < n; ++i) center(i) = 0.2 * rng.gaussian();
        const double radius = 2.0 + rng.uniform();
        prog.add_quadratic(Eigen::MatrixXd::Identity(n, n), -center,
                           center.squaredNorm() - radius * radius);
    }
    return prog;
}

void SolveBallProgram(benchmark::State& state) {
    const isac::ConvexProgram prog = ball_program(int(state.range(0)), 10);
    for (auto _ : state) {
        auto sol = isac::solve(prog);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(SolveBallProgram)->Arg(50)->Arg(130);

void LiftHermitian(benchmark::State& state) {
    isac::StreamRng rng(4, 1);
    const int n = int(state.range(0));
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian(1.0);
    const Eigen::MatrixXcd m = g * g.adjoint();
    for (auto _ : state) {
        auto lifted = isac::lift_hermitian(m);
        benchmark::DoNotOptimize(lifted);
    }
}
BENCHMARK(LiftHermitian)->Arg(64)->Arg(256);

}  // namespace
