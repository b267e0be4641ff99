#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "deshadow/config.hpp"
#include "deshadow/geometry.hpp"
#include "deshadow/image.hpp"

namespace deshadow {

// Randomized geometric augmentation ranges. Defaults follow the training
// protocol: horizontal flips, rotations within +/-40 degrees, XY translation
// within +/-20% of the image size, scaling in [0.8, 1.2] and shear within
// +/-20 degrees, with the result resized to out_size.
struct AugmentConfig {
    double p_hflip = 0.5;
    double rot_deg_min = -40.0, rot_deg_max = 40.0;
    double translate_frac_min = -0.2, translate_frac_max = 0.2;
    double scale_min = 0.8, scale_max = 1.2;
    double shear_deg_min = -20.0, shear_deg_max = 20.0;
    int out_rows = 512, out_cols = 512;
    bool enabled = true;

    static AugmentConfig from_config(const Config& cfg);
    void to_config(Config& cfg) const;
    void validate() const;
};

// One sampled transform, loggable.
struct AffineParams {
    bool hflip = false;
    double rot_deg = 0.0;
    double translate_x_frac = 0.0;
    double translate_y_frac = 0.0;
    double scale = 1.0;
    double shear_deg = 0.0;

    std::string describe() const;
};

// Uniform draws over the configured ranges; deterministic per draw_seed.
AffineParams sample_params(const AugmentConfig& cfg, std::uint64_t draw_seed);

// Forward pixel map for the given parameters on an image of the given
// shape: flip, then center-anchored rotate/scale/shear, then translate.
Affine build_affine(const AffineParams& params, int rows, int cols);

// Applies one sampled transform to both the image (bilinear) and its mask
// (nearest + re-binarize for ground truth), then resizes to out_size.
// Exposed borders are filled with 0.
std::pair<BScan, ShadowMask> augment_pair(const BScan& img, const ShadowMask& mask,
                                          const AugmentConfig& cfg, std::uint64_t draw_seed);

// Image-only variant used where no mask participates.
BScan augment_image(const BScan& img, const AugmentConfig& cfg, std::uint64_t draw_seed);

}  // namespace deshadow
