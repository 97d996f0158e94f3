#include <benchmark/benchmark.h>

#include "geodyn/flows.hpp"
#include "geodyn/verify.hpp"

namespace {

using namespace geodyn;

struct Fixture {
    FlowSpec flow = pendulum();
    DynSystem sys{SystemKind::GeometricDynamics, flow.metric, flow.X, std::nullopt};
    Trajectory traj;
    JacobiStructure js;

    Fixture() : js(flow.metric, flow.X, initial_H()) {
        Vec x0(2), v0(2);
        x0 << 1.0, 0.0;
        v0 << 0.0, 1.2;
        auto [t, rec] = integrate(sys, x0, v0, 0.0, 20.0, IntegratorSpec::rk4(1e-3));
        traj = std::move(t);
        (void)rec;
    }

    double initial_H() const {
        Vec x0(2), v0(2);
        x0 << 1.0, 0.0;
        v0 << 0.0, 1.2;
        return hamiltonian(flow.metric, flow.X, x0, v0);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void bm_pregeodesic_serial(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(pregeodesic_residuals(f.traj, f.js, /*parallel=*/false));
}

void bm_pregeodesic_parallel(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(pregeodesic_residuals(f.traj, f.js, /*parallel=*/true));
}

void bm_gd_equation_serial(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(gd_equation_residuals(f.traj, f.js, /*parallel=*/false));
}

void bm_gd_equation_parallel(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(gd_equation_residuals(f.traj, f.js, /*parallel=*/true));
}

BENCHMARK(bm_pregeodesic_serial);
BENCHMARK(bm_pregeodesic_parallel);
BENCHMARK(bm_gd_equation_serial);
BENCHMARK(bm_gd_equation_parallel);

}  // namespace

BENCHMARK_MAIN();
