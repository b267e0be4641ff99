#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "deshadow/config.hpp"
#include "deshadow/image.hpp"

namespace deshadow {

// Synthetic layered B-scan description. Stands in for clinical data: it only
// needs horizontal layered structure with known intensities, not realistic
// speckle statistics.
struct PhantomSpec {
    int height = 496;
    int width = 384;
    // Depth fractions in (0,1), strictly increasing; boundary k separates
    // layer k from layer k+1.
    std::vector<double> layer_boundaries = {0.15, 0.30, 0.45, 0.60, 0.75};
    // One mean per layer: boundaries.size() + 1 entries.
    std::vector<double> layer_mean_intensities = {0.04, 0.70, 0.45, 0.65, 0.82, 0.22};
    // Which intensity layer carries each contrast label; index into layers,
    // one per LayerLabel order (RNFL, IPL, PR, RPE). Negative = unlabeled.
    std::vector<int> labeled_layers = {1, 2, 3, 4};
    double speckle_std = 0.05;           // multiplicative noise scale
    double boundary_wobble_px = 3.0;     // sinusoidal boundary displacement
    std::uint64_t rng_seed = 0;

    void validate() const;

    static PhantomSpec from_config(const Config& cfg);
    void to_config(Config& cfg) const;
};

// Artificial shadow column band with exponential depth decay. alpha acts as
// a decay length in pixels: at row offset i below start_row the multiplier
// is exp(-i / alpha).
struct ShadowSpec {
    int col_start = 0;
    int width = 1;        // [1, 100]
    double alpha = 100.0; // [100, 300]
    int start_row = 0;

    void validate() const;

    static ShadowSpec from_config(const Config& cfg);
    void to_config(Config& cfg) const;
};

// Sampling ranges used when shadows are drawn at random.
struct ShadowRanges {
    int width_min = 1;
    int width_max = 100;
    double alpha_min = 100.0;
    double alpha_max = 300.0;
};

struct Phantom {
    BScan scan;
    // Per-pixel layer index (0-based from the top).
    std::vector<std::uint8_t> layer_map;
    int layers = 0;
    // Copied from the generating spec; see PhantomSpec::labeled_layers.
    std::vector<int> labeled_layers;

    std::uint8_t layer_at(int r, int c) const {
        return layer_map[static_cast<std::size_t>(r) * scan.width() + c];
    }
};

// Piecewise-constant layers + multiplicative speckle, clipped to [0,1].
// Deterministic per spec.rng_seed.
Phantom generate_phantom(const PhantomSpec& spec);

// Multiplies pixels inside the shadow band by the depth-decay factor and
// returns the binary mask of exactly the touched pixels. Pixels outside the
// band are bit-identical to the input.
std::pair<BScan, ShadowMask> inject_shadow(const BScan& img, const ShadowSpec& spec);

struct ValidationPair {
    BScan shadowed;
    ShadowMask mask;
    BScan ground_truth;
    std::vector<ShadowSpec> shadows;
};

// Draws n non-overlapping shadows with parameters uniform over `ranges` and
// injects them. start_row defaults to the detected tissue surface (the first
// row whose mean intensity reaches half of the brightest row mean).
ValidationPair make_validation_pair(const BScan& img, int n_shadows, std::uint64_t rng_seed,
                                    const ShadowRanges& ranges = {},
                                    std::optional<int> start_row = {});

// First row whose mean intensity reaches half of the maximum row mean.
int detect_surface_row(const BScan& img);

// 5x5 intensity windows suitable for the intralayer-contrast metric, picked
// from the phantom's layer map: per labeled layer, `per_side` windows inside
// shadow bands wide enough to hold them and `per_side` clear windows nearby.
// Returns an empty list when no shadow band is wide enough.
std::vector<RegionOfInterest> auto_rois(const Phantom& phantom, const ShadowMask& mask,
                                        int per_side = 5, int roi_size = 5);

}  // namespace deshadow
