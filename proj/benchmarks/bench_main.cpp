#include <benchmark/benchmark.h>

#include <random>

#include "ionlogic/ionlogic.hpp"

using namespace ionlogic;

namespace {

constexpr double kOmegaZ = kTwoPi * 3.4e6;

CouplingModel default_model(int n_max = kDefaultNMax) {
    return CouplingModel::from_carrier_rate(kOmegaZ, eta_for_ratio(4.0 / 3.0), kTwoPi * 92e3, n_max);
}

IonState spread_state(int n_max) {
    ComplexVector psi = ComplexVector::Zero(2 * (n_max + 1));
    for (int n = 0; n < n_max / 2; ++n) {
        psi(basis_index({Spin::Down, n}, n_max)) = 1.0;
        psi(basis_index({Spin::Up, n}, n_max)) = Complex(0.0, 1.0);
    }
    return IonState::pure(psi.normalized(), n_max);
}

void BM_CouplingModel(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(default_model(n_max));
}
BENCHMARK(BM_CouplingModel)->Arg(20)->Arg(60);

void BM_ApplyPulsePure(benchmark::State& state) {
    const int n_max = static_cast<int>(state.range(0));
    const CouplingModel m = default_model(n_max);
    const IonState psi = spread_state(n_max);
    const PulseSpec p{1, 3e-6, 0.3};
    for (auto _ : state) benchmark::DoNotOptimize(apply_pulse(psi, p, m));
}
BENCHMARK(BM_ApplyPulsePure)->Arg(20)->Arg(60);

void BM_ApplyPulseNoisy(benchmark::State& state) {
    const CouplingModel m = default_model();
    const IonState rho = to_density(spread_state(kDefaultNMax));
    NoiseConfig noise;
    noise.tau = 170e-6;
    const PulseSpec p{0, 3e-6, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(apply_pulse(rho, p, m, noise));
}
BENCHMARK(BM_ApplyPulseNoisy);

void BM_DressedHamiltonian(benchmark::State& state) {
    const CouplingModel m = default_model(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(DressedHamiltonian(m));
}
BENCHMARK(BM_DressedHamiltonian)->Arg(20)->Arg(40);

void BM_PropagateExact(benchmark::State& state) {
    const CouplingModel m = default_model();
    const DressedHamiltonian h(m);
    const IonState psi = IonState::basis({Spin::Down, 2});
    const double t = gate_time(m);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_exact(psi, t, h));
}
BENCHMARK(BM_PropagateExact);

void BM_EstimatePDown(benchmark::State& state) {
    const DetectorModel det;
    const CountHistogram hist = simulate_histogram(0.5, static_cast<std::uint64_t>(state.range(0)), det, 1);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_p_down(hist, det));
}
BENCHMARK(BM_EstimatePDown)->Arg(200)->Arg(10000);

void BM_SimulateHistogram(benchmark::State& state) {
    const DetectorModel det;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_histogram(0.5, 200, det, ++seed));
}
BENCHMARK(BM_SimulateHistogram);

void BM_FitDoubleSineDecay(benchmark::State& state) {
    const CouplingModel m = CouplingModel::from_carrier_rate(kOmegaZ, eta_for_ratio(1.295), kTwoPi * 92e3);
    NoiseConfig noise;
    noise.tau = 170e-6;
    const ScanCurve curve = run_rabi_scan(m, noise, ReadoutConfig::monte_carlo({}, 200),
                                          linear_grid(0.0, 150e-6, 1e-6), 7);
    for (auto _ : state) benchmark::DoNotOptimize(fit_double_sine_decay(curve));
}
BENCHMARK(BM_FitDoubleSineDecay)->Unit(benchmark::kMillisecond);

void BM_RabiScanMonteCarlo(benchmark::State& state) {
    const CouplingModel m = default_model();
    NoiseConfig noise;
    noise.tau = 170e-6;
    const auto times = linear_grid(0.0, 150e-6, 1e-6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_rabi_scan(m, noise, ReadoutConfig::monte_carlo({}, 200), times, 3));
    }
}
BENCHMARK(BM_RabiScanMonteCarlo)->Unit(benchmark::kMillisecond);

void BM_LeakageScan(benchmark::State& state) {
    const CouplingModel m = default_model();
    for (auto _ : state) benchmark::DoNotOptimize(leakage_scan(m, {0.005, 0.01, 0.02, 0.04, 0.08}));
}
BENCHMARK(BM_LeakageScan)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
