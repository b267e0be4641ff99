#include <benchmark/benchmark.h>

#include <torch/torch.h>

#include "deshadow/augment.hpp"
#include "deshadow/backbone.hpp"
#include "deshadow/detector.hpp"
#include "deshadow/evaluate.hpp"
#include "deshadow/losses.hpp"
#include "deshadow/phantom.hpp"
#include "deshadow/remover.hpp"
#include "deshadow/tensor_bridge.hpp"

using namespace deshadow;

namespace {

Phantom bench_phantom(int side = 256) {
    PhantomSpec spec;
    spec.height = side;
    spec.width = side;
    spec.speckle_std = 0.03;
    spec.rng_seed = 1;
    return generate_phantom(spec);
}

void BM_generate_phantom(benchmark::State& state) {
    PhantomSpec spec;
    spec.height = static_cast<int>(state.range(0));
    spec.width = static_cast<int>(state.range(0));
    spec.speckle_std = 0.05;
    for (auto _ : state) {
        spec.rng_seed++;
        benchmark::DoNotOptimize(generate_phantom(spec));
    }
}
BENCHMARK(BM_generate_phantom)->Arg(256)->Arg(496);

void BM_inject_shadow(benchmark::State& state) {
    const Phantom ph = bench_phantom();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_validation_pair(ph.scan, 2, seed++));
    }
}
BENCHMARK(BM_inject_shadow);

void BM_augment_pair(benchmark::State& state) {
    const Phantom ph = bench_phantom();
    ShadowSpec s;
    s.col_start = 60;
    s.width = 30;
    s.alpha = 150;
    auto [img, mask] = inject_shadow(ph.scan, s);
    AugmentConfig cfg;
    cfg.out_rows = cfg.out_cols = 256;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(augment_pair(img, mask, cfg, seed++));
}
BENCHMARK(BM_augment_pair);

void BM_detector_forward(benchmark::State& state) {
    DetectorConfig cfg;
    cfg.base_filters = static_cast<int>(state.range(0));
    Detector det(cfg);
    const torch::Tensor x = torch::rand({1, 1, 256, 256});
    torch::NoGradGuard guard;
    for (auto _ : state) benchmark::DoNotOptimize(det.forward(x));
}
BENCHMARK(BM_detector_forward)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_remover_infer(benchmark::State& state) {
    RemoverConfig cfg;
    cfg.base_filters = static_cast<int>(state.range(0));
    Remover rem(cfg);
    const Phantom ph = bench_phantom();
    std::vector<BScan> batch = {ph.scan, ph.scan};
    for (auto _ : state) benchmark::DoNotOptimize(rem.infer_batch(batch));
    state.counters["ms_per_image"] = benchmark::Counter(
        2.0 * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate |
                                                           benchmark::Counter::kInvert);
}
BENCHMARK(BM_remover_infer)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_backbone_extract(benchmark::State& state) {
    BackboneConfig cfg;
    cfg.width_scale = 1.0 / static_cast<double>(state.range(0));
    Backbone bb(cfg);
    const torch::Tensor x = torch::rand({1, 1, 256, 256});
    torch::NoGradGuard guard;
    for (auto _ : state) benchmark::DoNotOptimize(bb.extract(x));
}
BENCHMARK(BM_backbone_extract)->Arg(4)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_total_loss(benchmark::State& state) {
    BackboneConfig bb_cfg;
    bb_cfg.width_scale = 0.25;
    const Backbone backbone(bb_cfg);
    DetectorConfig det_cfg;
    det_cfg.base_filters = 16;
    Detector detector(det_cfg);
    detector.set_requires_grad(false);
    LossWeights weights;
    const torch::Tensor baseline = torch::rand({2, 1, 256, 256});
    const torch::Tensor deshadowed = torch::rand({2, 1, 256, 256});
    const torch::Tensor mask = (torch::rand({2, 1, 256, 256}) > 0.8).to(torch::kFloat32);
    torch::NoGradGuard guard;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            total_loss(baseline, deshadowed, mask, backbone, detector, weights));
}
BENCHMARK(BM_total_loss)->Unit(benchmark::kMillisecond);

void BM_compensate(benchmark::State& state) {
    const Phantom ph = bench_phantom(496);
    for (auto _ : state) benchmark::DoNotOptimize(compensate(ph.scan));
}
BENCHMARK(BM_compensate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
