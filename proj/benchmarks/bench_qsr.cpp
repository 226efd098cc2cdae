#include <benchmark/benchmark.h>

#include <qsr/cnn/network.hpp>
#include <qsr/cnn/train.hpp>
#include <qsr/fsr.hpp>
#include <qsr/metrics.hpp>
#include <qsr/resample.hpp>
#include <qsr/sensor.hpp>

#include <cmath>
#include <random>

namespace {

qsr::Image textured(int size, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> noise(-10.0, 10.0);
    qsr::Image img(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            img(x, y) = 128.0 + 60.0 * std::sin(0.3 * x) * std::cos(0.2 * y) + noise(rng);
        }
    }
    return img;
}

void BM_FsrReconstruct(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const qsr::Image f = textured(size, 1);
    const auto mask = qsr::tile_mask(qsr::generate_random_qs_mask(qsr::kDefaultMaskPeriod, 1), size, size);
    const auto sampled = qsr::simulate_quarter(f, mask);
    qsr::FsrParams params;
    params.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsr::fsr_reconstruct(sampled, params));
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_FsrReconstruct)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ModelBlock(benchmark::State& state) {
    const qsr::Image f = textured(64, 2);
    const auto mask = qsr::tile_mask(qsr::generate_random_qs_mask(qsr::kDefaultMaskPeriod, 2), 64, 64);
    const auto sampled = qsr::simulate_quarter(f, mask);
    qsr::FsrParams params;
    params.iterations = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsr::model_block(sampled, 16, 16, params));
    }
}
BENCHMARK(BM_ModelBlock)->Arg(25)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ConvForward(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const auto net = qsr::cnn::Network::create(20, 64, 3);
    const auto input = qsr::cnn::to_tensor(textured(size, 3), 1.0 / 255.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(input));
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_ConvForward)->Arg(41)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Gradients(benchmark::State& state) {
    const auto net = qsr::cnn::Network::create(20, 64, 4);
    const auto input = qsr::cnn::to_tensor(textured(41, 4), 1.0 / 255.0);
    const qsr::cnn::Tensor target(1, 41, 41, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsr::cnn::compute_gradients(net, input, target));
    }
}
BENCHMARK(BM_Gradients)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const qsr::Image a = textured(size, 5);
    const qsr::Image b = textured(size, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsr::ssim(a, b));
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_BicubicUpscale(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const qsr::Image low = qsr::simulate_lowres(textured(2 * size, 7));
    for (auto _ : state) {
        benchmark::DoNotOptimize(qsr::bicubic_upscale_x2(low));
    }
    state.SetItemsProcessed(state.iterations() * 4 * size * size);
}
BENCHMARK(BM_BicubicUpscale)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
