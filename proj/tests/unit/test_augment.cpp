#include <doctest.h>

#include <cmath>

#include "deshadow/augment.hpp"
#include "deshadow/rng.hpp"

using namespace deshadow;

namespace {

AugmentConfig identity_config(int out = 64) {
    AugmentConfig cfg;
    cfg.p_hflip = 0.0;
    cfg.rot_deg_min = cfg.rot_deg_max = 0.0;
    cfg.translate_frac_min = cfg.translate_frac_max = 0.0;
    cfg.scale_min = cfg.scale_max = 1.0;
    cfg.shear_deg_min = cfg.shear_deg_max = 0.0;
    cfg.out_rows = cfg.out_cols = out;
    return cfg;
}

std::pair<BScan, ShadowMask> sample_pair(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    BScan img;
    img.pixels = Image(rows, cols);
    for (double& v : img.pixels.data) v = rng.uniform();
    ShadowMask mask;
    mask.kind = MaskKind::ground_truth_binary;
    mask.values = Image(rows, cols, 0.0);
    for (int r = 0; r < rows; ++r)
        for (int c = cols / 3; c < cols / 3 + 4; ++c) mask.values.at(r, c) = 1.0;
    return {img, mask};
}

}  // namespace

TEST_CASE("augment: collapsed ranges reduce to a plain resize") {
    auto [img, mask] = sample_pair(48, 40, 1);
    const auto cfg = identity_config(64);
    const auto [out_img, out_mask] = augment_pair(img, mask, cfg, 123);
    const BScan expected = resize(img, 64, 64);
    CHECK(out_img.pixels.data == expected.pixels.data);
    const ShadowMask expected_mask = resize(mask, 64, 64);
    CHECK(out_mask.values.data == expected_mask.values.data);
}

TEST_CASE("augment: forced hflip mirrors columns") {
    auto [img, mask] = sample_pair(32, 32, 2);
    auto cfg = identity_config(32);
    cfg.p_hflip = 1.0;
    const auto [out_img, out_mask] = augment_pair(img, mask, cfg, 5);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c)
            CHECK(out_img.pixels.at(r, c) == doctest::Approx(img.pixels.at(r, 31 - c)));
}

TEST_CASE("augment: same draw seed is bit-identical, different seed differs") {
    auto [img, mask] = sample_pair(64, 64, 3);
    AugmentConfig cfg;  // full default ranges
    cfg.out_rows = cfg.out_cols = 64;
    const auto a = augment_pair(img, mask, cfg, 99);
    const auto b = augment_pair(img, mask, cfg, 99);
    CHECK(a.first.pixels.data == b.first.pixels.data);
    CHECK(a.second.values.data == b.second.values.data);
    const auto c = augment_pair(img, mask, cfg, 100);
    CHECK(a.first.pixels.data != c.first.pixels.data);
}

TEST_CASE("augment: mask stays binary and moves with the image") {
    AugmentConfig cfg;
    cfg.p_hflip = 0.0;
    cfg.rot_deg_min = cfg.rot_deg_max = 20.0;
    cfg.translate_frac_min = cfg.translate_frac_max = 0.05;
    cfg.scale_min = cfg.scale_max = 1.1;
    cfg.shear_deg_min = cfg.shear_deg_max = 5.0;
    cfg.out_rows = cfg.out_cols = 96;

    // Bright 5x5 marker with a matching mask.
    BScan img;
    img.pixels = Image(96, 96, 0.0);
    ShadowMask mask;
    mask.kind = MaskKind::ground_truth_binary;
    mask.values = Image(96, 96, 0.0);
    for (int r = 30; r < 35; ++r)
        for (int c = 60; c < 65; ++c) {
            img.pixels.at(r, c) = 1.0;
            mask.values.at(r, c) = 1.0;
        }

    const auto [out_img, out_mask] = augment_pair(img, mask, cfg, 7);

    for (double v : out_mask.values.data) CHECK((v == 0.0 || v == 1.0));

    // Centroids of the warped marker and the warped mask coincide.
    auto centroid = [](const Image& im) {
        double sr = 0, sc = 0, tot = 0;
        for (int r = 0; r < im.rows; ++r)
            for (int c = 0; c < im.cols; ++c) {
                sr += r * im.at(r, c);
                sc += c * im.at(r, c);
                tot += im.at(r, c);
            }
        REQUIRE(tot > 0);
        return std::pair<double, double>{sr / tot, sc / tot};
    };
    const auto [ir, ic] = centroid(out_img.pixels);
    const auto [mr, mc] = centroid(out_mask.values);
    CHECK(std::abs(ir - mr) < 1.0);
    CHECK(std::abs(ic - mc) < 1.0);
}

TEST_CASE("sample_params: uniform over configured ranges") {
    AugmentConfig cfg;  // defaults: rot [-40,40], scale [0.8,1.2], shear [-20,20]
    const int n = 10000;
    std::vector<int> rot_bins(10, 0);
    int flips = 0;
    for (int i = 0; i < n; ++i) {
        const AffineParams p = sample_params(cfg, static_cast<std::uint64_t>(i));
        CHECK(p.rot_deg >= -40.0);
        CHECK(p.rot_deg <= 40.0);
        CHECK(p.scale >= 0.8);
        CHECK(p.scale <= 1.2);
        CHECK(p.shear_deg >= -20.0);
        CHECK(p.shear_deg <= 20.0);
        CHECK(p.translate_x_frac >= -0.2);
        CHECK(p.translate_x_frac <= 0.2);
        rot_bins[std::min(9, static_cast<int>((p.rot_deg + 40.0) / 8.0))]++;
        flips += p.hflip ? 1 : 0;
    }
    // Chi-squared uniformity for the rotation histogram (df=9, p~0.01 -> 21.7).
    double chi2 = 0.0;
    for (int count : rot_bins) {
        const double expected = n / 10.0;
        chi2 += (count - expected) * (count - expected) / expected;
    }
    CHECK(chi2 < 21.7);
    CHECK(flips > n / 2 - 200);
    CHECK(flips < n / 2 + 200);
}

TEST_CASE("sample_params: degenerate range always returns the single value") {
    AugmentConfig cfg;
    cfg.rot_deg_min = cfg.rot_deg_max = 12.5;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(sample_params(cfg, seed).rot_deg == 12.5);
}

TEST_CASE("augment config: validation and round-trip") {
    AugmentConfig cfg;
    cfg.scale_min = 1.3;
    cfg.scale_max = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    Config kv;
    AugmentConfig defaults;
    defaults.to_config(kv);
    const AugmentConfig back = AugmentConfig::from_config(kv);
    CHECK(back.rot_deg_min == defaults.rot_deg_min);
    CHECK(back.out_rows == defaults.out_rows);
    CHECK(back.p_hflip == defaults.p_hflip);
}
