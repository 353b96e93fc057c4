#include "optomem/cavity_mode.hpp"
#include "optomem/constants.hpp"
#include "optomem/fluctuations.hpp"
#include "optomem/observables.hpp"
#include "optomem/sde_oracle.hpp"
#include "optomem/steady_state.hpp"

#include <benchmark/benchmark.h>

using namespace optomem;

namespace {

// 0.74 mm cavity with a 50 nm membrane at the maximum-slope point.
SystemParams short_cavity() {
    SystemParams p;
    p.cavity.length = 0.74e-3;
    p.cavity.wavelength = 1064e-9;
    p.cavity.kappa0 = kappa0_from_finesse(0.74e-3, 3e4);
    p.membrane.thickness = 50e-9;
    p.membrane.index = {2.0, 1e-6};
    p.membrane.z0 = 1064e-9 / 8;
    p.membrane.mass = 9e-12;
    p.membrane.omega_m = constants::two_pi * 10e6;
    p.membrane.quality = 4e6;
    p.drive.power = 28.5e-3;
    p.drive.laser_omega = p.cavity.reference_frequency();
    p.temperature = 1.0;
    return p;
}

LinearizedModel operating_point() {
    const SystemParams p = short_cavity();
    const auto sols = find_steady_states_at_detuning(p, p.membrane.omega_m);
    return linearize(p, sols.front());
}

void BM_mode_frequency(benchmark::State& state) {
    const SystemParams p = short_cavity();
    double q = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mode_frequency(p.cavity, p.membrane, q));
        q += 1e-3;
    }
}
BENCHMARK(BM_mode_frequency);

void BM_find_steady_states(benchmark::State& state) {
    const SystemParams p = short_cavity();
    for (auto _ : state) benchmark::DoNotOptimize(find_steady_states(p));
}
BENCHMARK(BM_find_steady_states)->Unit(benchmark::kMicrosecond);

void BM_solve_lyapunov(benchmark::State& state) {
    const LinearizedModel m = operating_point();
    for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(m));
}
BENCHMARK(BM_solve_lyapunov)->Unit(benchmark::kMicrosecond);

void BM_log_negativity(benchmark::State& state) {
    const Eigen::Matrix4d v = solve_lyapunov(operating_point()).covariance;
    for (auto _ : state) benchmark::DoNotOptimize(log_negativity(v));
}
BENCHMARK(BM_log_negativity);

void BM_simulate_cm(benchmark::State& state) {
    const LinearizedModel m = operating_point();
    const int trajectories = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const TrajectoryConfig cfg = default_trajectory_config(m, trajectories, 1, Integrator::exact_gaussian);
        benchmark::DoNotOptimize(simulate_cm(m, cfg));
    }
    state.SetItemsProcessed(state.iterations() * trajectories);
}
BENCHMARK(BM_simulate_cm)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
