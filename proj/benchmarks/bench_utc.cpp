#include <benchmark/benchmark.h>

#include <random>

#include "utc/controller.hpp"
#include "utc/linalg.hpp"
#include "utc/plant.hpp"
#include "utc/sim.hpp"
#include "utc/stability.hpp"

namespace {

utc::Mat random_spd(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    utc::Mat G(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) G(r, c) = gauss(rng);
    return G * G.transpose() + 0.1 * utc::Mat::Identity(d, d);
}

void BM_psd_sqrt(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::mt19937_64 rng(7);
    const utc::Mat M = random_spd(d, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(utc::psd_sqrt(M));
    }
}
BENCHMARK(BM_psd_sqrt)->Arg(4)->Arg(8)->Arg(16);

void BM_solve_stein(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    utc::Mat Z(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) Z(r, c) = gauss(rng);
    Z *= 0.8 / utc::spectral_radius(Z);
    const utc::Mat Q = utc::Mat::Identity(d, d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(utc::solve_stein(Z, Q));
    }
}
BENCHMARK(BM_solve_stein)->Arg(4)->Arg(7)->Arg(10);

void BM_update_admire(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const utc::LtiPlant plant =
        utc::make_admire(0.01, utc::Vec::Constant(3, 0.1), utc::Vec::Ones(3));

    utc::UtcParams params;
    params.prediction_steps = N;
    params.Q_u = 1e-4 * utc::Mat::Identity(4, 4);
    params.P_err = 1e-2 * utc::Mat::Identity(3, 3);

    utc::UtcState st{utc::Vec::Zero(4), params.Q_u};
    const utc::Vec x = utc::Vec::Constant(3, 0.2);
    const utc::Vec r = utc::Vec::Zero(3);
    std::mt19937_64 rng(3);

    for (auto _ : state) {
        benchmark::DoNotOptimize(utc::update(st, x, r, plant, params, rng));
    }
}
BENCHMARK(BM_update_admire)->Arg(1)->Arg(3)->Arg(5);

void BM_update_quadcopter(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    utc::QuadcopterParams qp;
    const utc::NonlinearPlant plant = utc::make_quadcopter(qp);

    utc::UtcParams params;
    params.prediction_steps = N;
    params.Q_u = 1e-2 * utc::Mat::Identity(4, 4);
    params.P_err = 1e-2 * utc::Mat::Identity(3, 3);

    utc::UtcState st{utc::Vec::Constant(4, 400.0), params.Q_u};
    utc::Vec x = utc::Vec::Zero(6);
    x.tail(3) = utc::Vec::Constant(3, 0.2);
    const utc::Vec r = utc::Vec::Zero(3);
    std::mt19937_64 rng(5);

    for (auto _ : state) {
        benchmark::DoNotOptimize(utc::update(st, x, r, plant, params, rng));
    }
}
BENCHMARK(BM_update_quadcopter)->Arg(1)->Arg(3)->Arg(5);

void BM_certify_admire(benchmark::State& state) {
    const utc::LtiPlant plant =
        utc::make_admire(0.01, utc::Vec::Constant(3, 0.1), utc::Vec::Ones(3));
    // A mildly stabilizing fixed gain for benchmark purposes only.
    const utc::Mat K = 0.2 * plant.B.transpose();
    for (auto _ : state) {
        const utc::ClosedLoop cl = utc::build_closed_loop(plant, K, 1);
        benchmark::DoNotOptimize(utc::certify(cl, plant.f.bound));
    }
}
BENCHMARK(BM_certify_admire);

}  // namespace

BENCHMARK_MAIN();
