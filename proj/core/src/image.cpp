#include "deshadow/image.hpp"

#include <algorithm>
#include <numeric>

namespace deshadow {

double min_value(const Image& img) {
    return img.data.empty() ? 0.0 : *std::min_element(img.data.begin(), img.data.end());
}

double max_value(const Image& img) {
    return img.data.empty() ? 0.0 : *std::max_element(img.data.begin(), img.data.end());
}

double mean_value(const Image& img) {
    if (img.data.empty()) return 0.0;
    const double sum = std::accumulate(img.data.begin(), img.data.end(), 0.0);
    return sum / static_cast<double>(img.data.size());
}

void clip_in_place(Image& img, double lo, double hi) {
    for (double& v : img.data) v = std::clamp(v, lo, hi);
}

const char* to_string(LayerLabel label) {
    switch (label) {
        case LayerLabel::RNFL: return "RNFL";
        case LayerLabel::IPL: return "IPL";
        case LayerLabel::PR: return "PR";
        case LayerLabel::RPE: return "RPE";
    }
    return "?";
}

LayerLabel layer_label_from_string(const std::string& s) {
    if (s == "RNFL") return LayerLabel::RNFL;
    if (s == "IPL") return LayerLabel::IPL;
    if (s == "PR") return LayerLabel::PR;
    if (s == "RPE") return LayerLabel::RPE;
    throw ValidationError("unknown layer label: '" + s + "' (expected RNFL, IPL, PR or RPE)");
}

void validate(const BScan& scan) {
    if (scan.height() < 2 || scan.width() < 2)
        throw ValidationError("BScan must be at least 2x2, got " + std::to_string(scan.height()) +
                              "x" + std::to_string(scan.width()));
    if (scan.pixels.data.size() != static_cast<std::size_t>(scan.height()) * scan.width())
        throw ValidationError("BScan pixel buffer does not match its shape");
    if (scan.is_normalized) {
        for (double v : scan.pixels.data)
            if (v < 0.0 || v > 1.0)
                throw ValidationError("normalized BScan holds a pixel outside [0,1]: " +
                                      std::to_string(v));
    }
}

void validate(const ShadowMask& mask) {
    for (double v : mask.values.data) {
        if (v < 0.0 || v > 1.0)
            throw ValidationError("mask value outside [0,1]: " + std::to_string(v));
        if (mask.kind == MaskKind::ground_truth_binary && v != 0.0 && v != 1.0)
            throw ValidationError("ground-truth mask holds a non-binary value: " +
                                  std::to_string(v));
    }
}

void validate_pair(const BScan& scan, const ShadowMask& mask) {
    if (!scan.pixels.same_shape(mask.values))
        throw ValidationError("mask shape " + std::to_string(mask.values.rows) + "x" +
                              std::to_string(mask.values.cols) + " does not match scan " +
                              std::to_string(scan.height()) + "x" + std::to_string(scan.width()));
}

void validate_roi(const RegionOfInterest& roi, int rows, int cols) {
    if (roi.size <= 0) throw ValidationError("ROI size must be positive");
    if (roi.row < 0 || roi.col < 0 || roi.row + roi.size > rows || roi.col + roi.size > cols)
        throw ValidationError("ROI " + std::to_string(roi.size) + "x" + std::to_string(roi.size) +
                              " at (" + std::to_string(roi.row) + "," + std::to_string(roi.col) +
                              ") leaves image bounds " + std::to_string(rows) + "x" +
                              std::to_string(cols));
}

double roi_mean(const Image& img, const RegionOfInterest& roi) {
    validate_roi(roi, img.rows, img.cols);
    double sum = 0.0;
    for (int r = roi.row; r < roi.row + roi.size; ++r)
        for (int c = roi.col; c < roi.col + roi.size; ++c) sum += img.at(r, c);
    return sum / (static_cast<double>(roi.size) * roi.size);
}

}  // namespace deshadow
