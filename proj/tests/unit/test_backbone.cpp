#include "testing.hpp"

#include <fstream>

#include "deshadow/backbone.hpp"
#include "deshadow/net_util.hpp"
#include "deshadow/rng.hpp"
#include "temp_dir.hpp"

using namespace deshadow;

namespace {

BackboneConfig tiny_config() {
    BackboneConfig cfg;
    cfg.width_scale = 1.0 / 16.0;
    cfg.seed = 7;
    cfg.dtype = torch::kFloat64;
    return cfg;
}

torch::Tensor random_input(int side, std::uint64_t seed, torch::Dtype dtype = torch::kFloat64) {
    Rng rng(seed);
    torch::Tensor t = torch::empty({1, 1, side, side}, torch::kFloat64);
    auto acc = t.accessor<double, 4>();
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) acc[0][0][r][c] = rng.uniform();
    return t.to(dtype);
}

}  // namespace

TEST_CASE("backbone: frozen weights give bit-identical repeated extractions") {
    Backbone bb(tiny_config());
    const torch::Tensor x = random_input(64, 3);
    const auto a = bb.extract(x);
    const auto b = bb.extract(x);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].equal(b[i]));
}

TEST_CASE("backbone: tap spatial sizes strictly decrease") {
    BackboneConfig cfg = tiny_config();
    cfg.tap_ids = {9, 33, 141, 150};
    Backbone bb(cfg);
    const auto taps = bb.extract(random_input(128, 5));
    REQUIRE(taps.size() == 4);
    for (std::size_t i = 1; i < taps.size(); ++i) {
        CHECK(taps[i].size(2) < taps[i - 1].size(2));
        CHECK(taps[i].size(3) < taps[i - 1].size(3));
    }
    // 128 input: stem/pool to 32, then 32,16,8,4 across the stages.
    CHECK(taps[0].size(2) == 32);
    CHECK(taps[1].size(2) == 16);
    CHECK(taps[2].size(2) == 8);
    CHECK(taps[3].size(2) == 4);
}

TEST_CASE("backbone: same seed builds identical extractors, different seed differs") {
    Backbone a(tiny_config()), b(tiny_config());
    CHECK(a.weights_hash() == b.weights_hash());
    const torch::Tensor x = random_input(64, 9);
    CHECK(a.extract(x)[0].equal(b.extract(x)[0]));

    BackboneConfig other = tiny_config();
    other.seed = 8;
    Backbone c(other);
    CHECK(c.weights_hash() != a.weights_hash());
}

TEST_CASE("backbone: parameters are excluded from gradients") {
    Backbone bb(tiny_config());
    for (const auto& p : bb.module().parameters()) CHECK_FALSE(p.requires_grad());

    // Input gradients still flow.
    torch::Tensor x = random_input(64, 11).requires_grad_(true);
    const auto taps = bb.extract(x);
    torch::Tensor loss = taps[0].square().sum();
    loss.backward();
    REQUIRE(x.grad().defined());
    CHECK(x.grad().abs().sum().item<double>() > 0.0);
}

TEST_CASE("backbone: activations stay finite through all 151 convolutions") {
    BackboneConfig cfg = tiny_config();
    cfg.tap_ids = {9, 33, 141, 150};
    Backbone bb(cfg);
    const auto taps = bb.extract(random_input(64, 13));
    for (const auto& t : taps) {
        CHECK(t.isfinite().all().item<bool>());
        const double rms = t.square().mean().sqrt().item<double>();
        CHECK(rms > 1e-6);
        CHECK(rms < 1e3);
    }
}

TEST_CASE("backbone: pretrained mode requires a weights file") {
    BackboneConfig cfg = tiny_config();
    cfg.mode = BackboneConfig::Mode::pretrained;
    cfg.weights_path = "/nonexistent/weights.bin";
    CHECK_THROWS_AS(Backbone{cfg}, IoError);
}

TEST_CASE("backbone: weights file round-trip, manifest count check, corrupt file") {
    testkit::TempDir tmp;
    Backbone original(tiny_config());
    original.save_weights(tmp / "bb.weights");

    BackboneConfig cfg = tiny_config();
    cfg.mode = BackboneConfig::Mode::pretrained;
    cfg.weights_path = tmp / "bb.weights";
    Backbone loaded(cfg);
    CHECK(loaded.weights_hash() == original.weights_hash());

    // A width-mismatched architecture must be rejected via the declared count.
    BackboneConfig wrong = cfg;
    wrong.width_scale = 1.0 / 8.0;
    CHECK_THROWS_AS(Backbone{wrong}, Error);

    // Corrupt container.
    {
        std::ofstream out(tmp / "bad.weights", std::ios::binary);
        out << "DSTENSR1garbage";
    }
    BackboneConfig corrupt = cfg;
    corrupt.weights_path = tmp / "bad.weights";
    CHECK_THROWS_AS(Backbone{corrupt}, FormatError);
}

TEST_CASE("backbone: invalid taps are rejected") {
    BackboneConfig cfg = tiny_config();
    cfg.tap_ids = {9, 34};
    CHECK_THROWS_AS(Backbone{cfg}, ConfigError);
    cfg.tap_ids = {};
    CHECK_THROWS_AS(Backbone{cfg}, ConfigError);
}

TEST_CASE("backbone: full-width architecture matches the 152-layer conv count") {
    // stage-end conv indices derive from 1 stem conv + 3 per bottleneck with
    // (3,8,36,3) blocks: 9, 33, 141, 150.
    const auto& ends = Backbone::stage_end_conv_indices();
    REQUIRE(ends.size() == 4);
    CHECK(ends[0] == 9);
    CHECK(ends[1] == 33);
    CHECK(ends[2] == 141);
    CHECK(ends[3] == 150);
}

TEST_CASE("backbone: extract_features wrapper validates size and reports taps") {
    Backbone bb(tiny_config());
    BScan img;
    img.pixels = Image(64, 64, 0.5);
    const FeatureStack stack = bb.extract_features(img);
    const std::vector<int> expected_taps{9, 33, 141};
    CHECK(stack.tap_ids == expected_taps);
    REQUIRE(stack.activations.size() == 3);

    BScan small;
    small.pixels = Image(16, 16, 0.5);
    CHECK_THROWS_AS(bb.extract_features(small), ValidationError);
}
