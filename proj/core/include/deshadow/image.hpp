#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "deshadow/errors.hpp"

namespace deshadow {

// Row-major 2-D array of doubles. Row 0 is the shallowest (vitreous) row;
// depth increases with the row index. Columns are lateral A-scan positions.
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Image() = default;
    Image(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[static_cast<std::size_t>(r) * cols + c];
    }
    double at(int r, int c) const {
        assert(r >= 0 && r < rows && c >= 0 && c < cols);
        return data[static_cast<std::size_t>(r) * cols + c];
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return rows == o.rows && cols == o.cols; }
};

double min_value(const Image& img);
double max_value(const Image& img);
double mean_value(const Image& img);
void clip_in_place(Image& img, double lo = 0.0, double hi = 1.0);

// Single-channel OCT B-scan with intensities in [0,1].
struct BScan {
    Image pixels;
    std::string source_id;
    bool is_normalized = true;

    int height() const { return pixels.rows; }
    int width() const { return pixels.cols; }
};

enum class MaskKind {
    ground_truth_binary,
    predicted_soft,
};

// Per-pixel shadow map aligned with a BScan. Ground-truth masks hold only
// {0,1}; predicted masks are soft values in [0,1].
struct ShadowMask {
    Image values;
    MaskKind kind = MaskKind::ground_truth_binary;
};

enum class LayerLabel { RNFL, IPL, PR, RPE };

const char* to_string(LayerLabel label);
LayerLabel layer_label_from_string(const std::string& s);
inline constexpr LayerLabel kAllLayers[] = {LayerLabel::RNFL, LayerLabel::IPL,
                                            LayerLabel::PR, LayerLabel::RPE};

// A size x size intensity window used by the intralayer-contrast metric.
struct RegionOfInterest {
    int row = 0;  // top-left corner
    int col = 0;
    int size = 5;
    LayerLabel layer = LayerLabel::RNFL;
    bool shadowed = false;
};

// Throws ValidationError when the scan claims to be normalized but holds
// out-of-range pixels, or is degenerate (< 2x2).
void validate(const BScan& scan);

// Throws ValidationError when a ground-truth mask holds non-binary values or
// any value leaves [0,1].
void validate(const ShadowMask& mask);

// Shape agreement between a scan and its mask.
void validate_pair(const BScan& scan, const ShadowMask& mask);

// The ROI window must lie fully inside an image of the given shape.
void validate_roi(const RegionOfInterest& roi, int rows, int cols);

// Mean intensity over the ROI window.
double roi_mean(const Image& img, const RegionOfInterest& roi);

}  // namespace deshadow
