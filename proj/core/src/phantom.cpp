#include "deshadow/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "deshadow/rng.hpp"

namespace deshadow {

void PhantomSpec::validate() const {
    if (height < 2 || width < 2) throw ValidationError("phantom must be at least 2x2");
    if (layer_mean_intensities.size() != layer_boundaries.size() + 1)
        throw ValidationError("phantom needs boundaries+1 layer means, got " +
                              std::to_string(layer_mean_intensities.size()) + " means for " +
                              std::to_string(layer_boundaries.size()) + " boundaries");
    double prev = 0.0;
    for (double b : layer_boundaries) {
        if (b <= prev || b >= 1.0)
            throw ValidationError("layer boundaries must be strictly increasing within (0,1)");
        prev = b;
    }
    for (double m : layer_mean_intensities)
        if (m < 0.0 || m > 1.0) throw ValidationError("layer mean outside [0,1]");
    if (speckle_std < 0.0) throw ValidationError("speckle_std must be >= 0");
    if (boundary_wobble_px < 0.0) throw ValidationError("boundary wobble must be >= 0");
    for (int li : labeled_layers)
        if (li >= static_cast<int>(layer_mean_intensities.size()))
            throw ValidationError("labeled layer index out of range");
}

void ShadowSpec::validate() const {
    if (width < 1 || width > 100)
        throw ValidationError("shadow width must lie in [1,100], got " + std::to_string(width));
    if (alpha < 100.0 || alpha > 300.0)
        throw ValidationError("shadow alpha must lie in [100,300], got " + std::to_string(alpha));
    if (col_start < 0) throw ValidationError("shadow col_start must be >= 0");
    if (start_row < 0) throw ValidationError("shadow start_row must be >= 0");
}

PhantomSpec PhantomSpec::from_config(const Config& cfg) {
    PhantomSpec spec;
    spec.height = static_cast<int>(cfg.get_int("phantom.height", spec.height));
    spec.width = static_cast<int>(cfg.get_int("phantom.width", spec.width));
    spec.layer_boundaries = cfg.get_doubles("phantom.boundaries", spec.layer_boundaries);
    spec.layer_mean_intensities = cfg.get_doubles("phantom.means", spec.layer_mean_intensities);
    if (cfg.has("phantom.labeled_layers")) {
        spec.labeled_layers.clear();
        for (double v : cfg.get_doubles("phantom.labeled_layers"))
            spec.labeled_layers.push_back(static_cast<int>(v));
    }
    spec.speckle_std = cfg.get_double("phantom.speckle_std", spec.speckle_std);
    spec.boundary_wobble_px = cfg.get_double("phantom.wobble_px", spec.boundary_wobble_px);
    spec.rng_seed = static_cast<std::uint64_t>(cfg.get_int("phantom.seed", 0));
    spec.validate();
    return spec;
}

void PhantomSpec::to_config(Config& cfg) const {
    cfg.set_int("phantom.height", height);
    cfg.set_int("phantom.width", width);
    std::ostringstream b, m, l;
    for (std::size_t i = 0; i < layer_boundaries.size(); ++i)
        b << (i ? "," : "") << layer_boundaries[i];
    for (std::size_t i = 0; i < layer_mean_intensities.size(); ++i)
        m << (i ? "," : "") << layer_mean_intensities[i];
    for (std::size_t i = 0; i < labeled_layers.size(); ++i) l << (i ? "," : "") << labeled_layers[i];
    cfg.set("phantom.boundaries", b.str());
    cfg.set("phantom.means", m.str());
    cfg.set("phantom.labeled_layers", l.str());
    cfg.set_double("phantom.speckle_std", speckle_std);
    cfg.set_double("phantom.wobble_px", boundary_wobble_px);
    cfg.set_int("phantom.seed", static_cast<std::int64_t>(rng_seed));
}

ShadowSpec ShadowSpec::from_config(const Config& cfg) {
    ShadowSpec spec;
    spec.col_start = static_cast<int>(cfg.get_int("shadow.col_start", spec.col_start));
    spec.width = static_cast<int>(cfg.get_int("shadow.width", spec.width));
    spec.alpha = cfg.get_double("shadow.alpha", spec.alpha);
    spec.start_row = static_cast<int>(cfg.get_int("shadow.start_row", spec.start_row));
    spec.validate();
    return spec;
}

void ShadowSpec::to_config(Config& cfg) const {
    cfg.set_int("shadow.col_start", col_start);
    cfg.set_int("shadow.width", width);
    cfg.set_double("shadow.alpha", alpha);
    cfg.set_int("shadow.start_row", start_row);
}

Phantom generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    Rng rng(spec.rng_seed);

    const int h = spec.height;
    const int w = spec.width;
    const int n_bounds = static_cast<int>(spec.layer_boundaries.size());

    // Per-boundary sinusoid parameters, drawn before any pixel noise so the
    // draw order is stable.
    std::vector<double> freq(n_bounds), phase(n_bounds);
    for (int k = 0; k < n_bounds; ++k) {
        freq[k] = rng.uniform(1.0, 3.0);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }

    // Boundary row per column, kept strictly ordered.
    std::vector<int> bound_rows(static_cast<std::size_t>(n_bounds) * w);
    for (int j = 0; j < w; ++j) {
        int prev = 0;
        for (int k = 0; k < n_bounds; ++k) {
            const double base = spec.layer_boundaries[k] * h;
            const double wob = spec.boundary_wobble_px *
                               std::sin(2.0 * std::numbers::pi * freq[k] * j / w + phase[k]);
            int row = static_cast<int>(std::lround(base + wob));
            row = std::clamp(row, prev + 1, h - 1);
            bound_rows[static_cast<std::size_t>(k) * w + j] = row;
            prev = row;
        }
    }

    Phantom out;
    out.scan.pixels = Image(h, w);
    out.scan.source_id = "phantom";
    out.layer_map.assign(static_cast<std::size_t>(h) * w, 0);
    out.layers = n_bounds + 1;
    out.labeled_layers = spec.labeled_layers;

    for (int r = 0; r < h; ++r) {
        for (int j = 0; j < w; ++j) {
            int layer = 0;
            while (layer < n_bounds && r >= bound_rows[static_cast<std::size_t>(layer) * w + j])
                ++layer;
            out.layer_map[static_cast<std::size_t>(r) * w + j] = static_cast<std::uint8_t>(layer);
            double v = spec.layer_mean_intensities[layer];
            if (spec.speckle_std > 0.0) v *= 1.0 + spec.speckle_std * rng.normal();
            out.scan.pixels.at(r, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

std::pair<BScan, ShadowMask> inject_shadow(const BScan& img, const ShadowSpec& spec) {
    spec.validate();
    if (spec.col_start + spec.width > img.width())
        throw ValidationError("shadow columns [" + std::to_string(spec.col_start) + "," +
                              std::to_string(spec.col_start + spec.width) + ") leave image width " +
                              std::to_string(img.width()));
    if (spec.start_row >= img.height())
        throw ValidationError("shadow start_row " + std::to_string(spec.start_row) +
                              " leaves image height " + std::to_string(img.height()));

    BScan shadowed = img;
    ShadowMask mask;
    mask.kind = MaskKind::ground_truth_binary;
    mask.values = Image(img.height(), img.width(), 0.0);
    for (int r = spec.start_row; r < img.height(); ++r) {
        const double mult = std::exp(-static_cast<double>(r - spec.start_row) / spec.alpha);
        for (int c = spec.col_start; c < spec.col_start + spec.width; ++c) {
            shadowed.pixels.at(r, c) = img.pixels.at(r, c) * mult;
            mask.values.at(r, c) = 1.0;
        }
    }
    return {std::move(shadowed), std::move(mask)};
}

int detect_surface_row(const BScan& img) {
    double best = 0.0;
    std::vector<double> row_means(img.height(), 0.0);
    for (int r = 0; r < img.height(); ++r) {
        double sum = 0.0;
        for (int c = 0; c < img.width(); ++c) sum += img.pixels.at(r, c);
        row_means[r] = sum / img.width();
        best = std::max(best, row_means[r]);
    }
    if (best <= 0.0) return 0;
    for (int r = 0; r < img.height(); ++r)
        if (row_means[r] >= 0.5 * best) return r;
    return 0;
}

ValidationPair make_validation_pair(const BScan& img, int n_shadows, std::uint64_t rng_seed,
                                    const ShadowRanges& ranges, std::optional<int> start_row) {
    if (n_shadows < 1) throw ValidationError("n_shadows must be >= 1");
    if (img.width() <= 2 * ranges.width_max)
        throw ValidationError("image width " + std::to_string(img.width()) +
                              " must exceed twice the max shadow width " +
                              std::to_string(ranges.width_max));

    const int surface = start_row ? *start_row : detect_surface_row(img);
    Rng rng(rng_seed);

    std::vector<ShadowSpec> shadows;
    constexpr int kMaxRetries = 100;
    for (int k = 0; k < n_shadows; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
            ShadowSpec s;
            s.width = static_cast<int>(rng.uniform_int(ranges.width_min, ranges.width_max));
            s.alpha = rng.uniform(ranges.alpha_min, ranges.alpha_max);
            s.col_start = static_cast<int>(rng.uniform_int(0, img.width() - s.width));
            s.start_row = surface;
            const bool overlaps = std::any_of(shadows.begin(), shadows.end(), [&](const ShadowSpec& o) {
                return s.col_start < o.col_start + o.width && o.col_start < s.col_start + s.width;
            });
            if (!overlaps) {
                shadows.push_back(s);
                placed = true;
            }
        }
        if (!placed)
            throw PlacementError("could not place " + std::to_string(n_shadows) +
                                 " non-overlapping shadows after " + std::to_string(kMaxRetries) +
                                 " retries");
    }

    ValidationPair pair;
    pair.ground_truth = img;
    pair.shadows = shadows;
    BScan current = img;
    Image mask_union(img.height(), img.width(), 0.0);
    for (const ShadowSpec& s : shadows) {
        auto [next, mask] = inject_shadow(current, s);
        current = std::move(next);
        for (std::size_t i = 0; i < mask_union.data.size(); ++i)
            mask_union.data[i] = std::max(mask_union.data[i], mask.values.data[i]);
    }
    pair.shadowed = std::move(current);
    pair.mask.kind = MaskKind::ground_truth_binary;
    pair.mask.values = std::move(mask_union);
    return pair;
}

namespace {

struct Band {
    int begin = 0;
    int end = 0;  // exclusive
    int center() const { return (begin + end) / 2; }
};

std::vector<Band> mask_column_bands(const ShadowMask& mask) {
    std::vector<bool> shadowed_col(mask.values.cols, false);
    for (int c = 0; c < mask.values.cols; ++c)
        for (int r = 0; r < mask.values.rows; ++r)
            if (mask.values.at(r, c) > 0.5) {
                shadowed_col[c] = true;
                break;
            }
    std::vector<Band> bands;
    for (int c = 0; c < mask.values.cols; ++c) {
        if (!shadowed_col[c]) continue;
        if (!bands.empty() && bands.back().end == c)
            bands.back().end = c + 1;
        else
            bands.push_back({c, c + 1});
    }
    return bands;
}

// Rows where the window [col, col+size) lies fully inside `layer`, away
// from the layer's wobbling boundaries.
std::optional<int> window_row_for_layer(const Phantom& ph, int layer, int col, int size) {
    int top = 0, bottom = ph.scan.height() - 1;
    for (int c = col; c < col + size; ++c) {
        int first = -1, last = -1;
        for (int r = 0; r < ph.scan.height(); ++r) {
            if (ph.layer_at(r, c) == layer) {
                if (first < 0) first = r;
                last = r;
            }
        }
        if (first < 0) return std::nullopt;
        top = std::max(top, first);
        bottom = std::min(bottom, last);
    }
    if (bottom - top + 1 < size) return std::nullopt;
    return top + (bottom - top + 1 - size) / 2;
}

}  // namespace

std::vector<RegionOfInterest> auto_rois(const Phantom& phantom, const ShadowMask& mask,
                                        int per_side, int roi_size) {
    const std::vector<Band> bands = mask_column_bands(mask);
    std::vector<Band> wide_bands;
    for (const Band& b : bands)
        if (b.end - b.begin >= roi_size + 2) wide_bands.push_back(b);
    if (wide_bands.empty()) return {};

    std::vector<RegionOfInterest> rois;
    for (std::size_t label_idx = 0; label_idx < 4; ++label_idx) {
        if (label_idx >= phantom.labeled_layers.size()) break;
        const int layer = phantom.labeled_layers[label_idx];
        if (layer < 0) continue;
        const LayerLabel label = kAllLayers[label_idx];

        // Shadowed windows: spread over the wide bands.
        std::vector<RegionOfInterest> shadowed;
        for (std::size_t bi = 0; shadowed.size() < static_cast<std::size_t>(per_side); ++bi) {
            const Band& band = wide_bands[bi % wide_bands.size()];
            const int slots = std::max(1, (band.end - band.begin - 2) / roi_size);
            const int slot = static_cast<int>(bi / wide_bands.size()) % slots;
            const int col = band.begin + 1 + slot * roi_size;
            if (col + roi_size > band.end - 1) {
                if (bi > static_cast<std::size_t>(per_side) * wide_bands.size() * 4) break;
                continue;
            }
            if (auto row = window_row_for_layer(phantom, layer, col, roi_size))
                shadowed.push_back({*row, col, roi_size, label, true});
            if (bi > static_cast<std::size_t>(per_side) * wide_bands.size() * 4) break;
        }
        if (shadowed.size() < static_cast<std::size_t>(per_side)) return {};

        // Clear windows: nearest fully-unshadowed columns to any band.
        std::vector<std::pair<int, int>> clear_cols;  // (distance, col)
        for (int col = 0; col + roi_size <= phantom.scan.width(); ++col) {
            bool clear = true;
            for (int c = col; c < col + roi_size && clear; ++c)
                for (const Band& b : bands)
                    if (c >= b.begin && c < b.end) {
                        clear = false;
                        break;
                    }
            if (!clear) continue;
            int dist = phantom.scan.width();
            for (const Band& b : bands)
                dist = std::min(dist, std::abs(col + roi_size / 2 - b.center()));
            clear_cols.push_back({dist, col});
        }
        std::sort(clear_cols.begin(), clear_cols.end());
        std::vector<RegionOfInterest> clear;
        for (const auto& [dist, col] : clear_cols) {
            if (clear.size() >= static_cast<std::size_t>(per_side)) break;
            const bool too_close = std::any_of(clear.begin(), clear.end(), [&](const auto& r) {
                return std::abs(col - r.col) < roi_size;
            });
            if (too_close) continue;
            if (auto row = window_row_for_layer(phantom, layer, col, roi_size))
                clear.push_back({*row, col, roi_size, label, false});
        }
        if (clear.size() < static_cast<std::size_t>(per_side)) return {};

        rois.insert(rois.end(), clear.begin(), clear.end());
        rois.insert(rois.end(), shadowed.begin(), shadowed.end());
    }
    return rois;
}

}  // namespace deshadow
