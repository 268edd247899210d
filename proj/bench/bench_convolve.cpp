#include <benchmark/benchmark.h>

#include <random>

#include "rrl/fft.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(g);
    return v;
}

void BM_fft_convolve(benchmark::State& st) {
    const auto a = random_vec(static_cast<std::size_t>(st.range(0)), 1), b = random_vec(static_cast<std::size_t>(st.range(0)), 2);
    for (auto _ : st) benchmark::DoNotOptimize(rrl::fft_convolve(a, b));
    st.SetComplexityN(st.range(0));
}

void BM_fft_convolve_extended(benchmark::State& st) {
    const auto a = random_vec(static_cast<std::size_t>(st.range(0)), 1), b = random_vec(static_cast<std::size_t>(st.range(0)), 2);
    for (auto _ : st) benchmark::DoNotOptimize(rrl::fft_convolve_extended(a, b));
}

// serial references
void BM_direct_convolve(benchmark::State& st) {
    const auto a = random_vec(static_cast<std::size_t>(st.range(0)), 1), b = random_vec(static_cast<std::size_t>(st.range(0)), 2);
    for (auto _ : st) benchmark::DoNotOptimize(rrl::direct_convolve_raw(a, b));
    st.SetComplexityN(st.range(0));
}

void BM_dft_reference(benchmark::State& st) {
    const auto re = random_vec(static_cast<std::size_t>(st.range(0)), 3);
    std::vector<rrl::cplx> x(re.begin(), re.end());
    for (auto _ : st) benchmark::DoNotOptimize(rrl::dft_reference(x, 1));
}

void BM_fft_inplace(benchmark::State& st) {
    const auto re = random_vec(static_cast<std::size_t>(st.range(0)), 3);
    const std::vector<rrl::cplx> x(re.begin(), re.end());
    for (auto _ : st) {
        auto y = x;
        rrl::fft_inplace(y, 1);
        benchmark::DoNotOptimize(y.data());
    }
}

}  // namespace

BENCHMARK(BM_fft_convolve)->RangeMultiplier(8)->Range(1 << 10, 1 << 19)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fft_convolve_extended)->RangeMultiplier(8)->Range(1 << 10, 1 << 19)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_convolve)->RangeMultiplier(4)->Range(1 << 8, 1 << 14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_fft_inplace)->RangeMultiplier(4)->Range(1 << 8, 1 << 12);
BENCHMARK(BM_dft_reference)->RangeMultiplier(4)->Range(1 << 8, 1 << 12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
