#include <benchmark/benchmark.h>

#include <random>

#include "reskit/bath.hpp"
#include "reskit/feshbach.hpp"
#include "reskit/linop.hpp"
#include "reskit/resonance.hpp"

namespace {

using namespace reskit;

CMatrix random_hermitian(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    return 0.5 * (a + a.adjoint()).eval();
}

void BM_Resolvent(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix h = random_hermitian(n, 7);
    for (auto _ : state) {
        auto r = linop::resolvent(h, Complex(0.1, -0.2));
        benchmark::DoNotOptimize(r.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Resolvent)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_FeshbachMap(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix h = random_hermitian(n, 11);
    auto q = linop::OrthProjection::onto_axes({0, 1}, n);
    for (auto _ : state) {
        auto fr = feshbach::feshbach_map(h, q, Complex(0.05, -0.3));
        benchmark::DoNotOptimize(fr.map.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_FeshbachMap)->RangeMultiplier(2)->Range(16, 256)->Complexity();

// Bordered-diagonal shifted solves against the dense route.
void BM_BorderedSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = -1.0 + 2.0 * i / (n - 1.0);
    for (int i = 2; i < n; ++i) {
        m(0, i) = Complex(0.01, 0.ootnote0);
    }
    for (auto _ : state) state.SkipWithError("placeholder");
}

void BM_ResolventEvaluator(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    CMatrix m = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = -1.0 + 2.0 * i / (n - 1.0);
    for (int i = 2; i < n; ++i) {
        m(0, i) = 0.01;
        m(i, 0) = 0.01;
        m(1, i) = Complex(0.0, 0.02);
        m(i, 1) = Complex(0.0, -0.02);
    }
    linop::ResolventEvaluator ev(m);
    CMatrix b = CMatrix::Zero(n, 2);
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;
    for (auto _ : state) {
        auto x = ev.solve(Complex(0.0, -0.01), b);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_ResolventEvaluator)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_RieszProjection(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    CMatrix a(2, 2);
    a << Complex(0.1, 0.0), Complex(0.3, 0.1), Complex(0.0, 0.0), Complex(0.0, 1.0);
    for (auto _ : state) {
        auto q = resonance::riesz_projection(a, Complex(0.1, 0.0), 0.45, nodes);
        benchmark::DoNotOptimize(q.data());
    }
}
BENCHMARK(BM_RieszProjection)->RangeMultiplier(2)->Range(16, 256);

void BM_LevelShift(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Model model = bath::build_friedrichs({{0.0, {[](double) { return 1.0; }}}},
                                         bath::uniform_grid(-1.0, 1.0, n), 0.02);
    for (auto _ : state) {
        auto lsd = resonance::level_shift(model, 0);
        benchmark::DoNotOptimize(lsd.eigenvalues.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_LevelShift)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

} // namespace

BENCHMARK_MAIN();
