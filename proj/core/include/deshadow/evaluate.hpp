#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deshadow/dataset.hpp"
#include "deshadow/image.hpp"
#include "deshadow/remover.hpp"

namespace deshadow {

// |I1 - I2| / (I1 + I2) with I1 pooled over the clear windows and I2 over
// the shadowed ones. 0 means shadow-free, 1 means full shadow. Throws
// ValidationError when I1 + I2 == 0 (undefined contrast) or when the window
// sets are inconsistent (mixed layers, wrong flags, out of bounds).
double intralayer_contrast(const Image& img, const std::vector<RegionOfInterest>& rois_clear,
                           const std::vector<RegionOfInterest>& rois_shadowed);

// Per-column mean intensity inside the row band [row_top, row_bottom), over
// columns [col_begin, col_end).
std::vector<double> lateral_profile(const Image& img, int row_top, int row_bottom,
                                    int col_begin, int col_end);

// Energy-based attenuation correction used as the comparison baseline:
// decompress pixel values, divide by twice the cumulative decompressed
// energy from the row downward in its column (denominator floored at
// 10^-threshold), recompress, apply the contrast exponent, clip to [0,1].
// Columns with zero total energy are left unmodified and flagged.
struct CompensationParams {
    double contrast_exponent = 1.0;
    double decompression_exponent = 4.0;
    double compression_exponent = 4.0;
    double threshold_exponent = 6.0;
};

BScan compensate(const BScan& img, const CompensationParams& params = {},
                 std::vector<int>* flagged_columns = nullptr);

struct RestorationError {
    double mae = 0.0;
    double psnr_db = 0.0;
};

// Mean absolute error and PSNR (peak 1.0) over the masked pixels only; the
// PSNR is capped to keep reports finite. Throws on an empty mask.
RestorationError restoration_error(const BScan& deshadowed, const BScan& ground_truth,
                                   const ShadowMask& mask, double psnr_cap_db = 100.0);

// ROI definitions: tab-separated lines "stem  layer  shadowed  row  col
// [size]", '#' comments allowed.
std::map<std::string, std::vector<RegionOfInterest>> load_roi_file(
    const std::filesystem::path& path);
void save_roi_file(const std::filesystem::path& path,
                   const std::map<std::string, std::vector<RegionOfInterest>>& rois);

struct LayerMetrics {
    bool valid = false;
    double baseline = 0.0;
    double deshadowed = 0.0;
    std::optional<double> compensated;
    double improvement_pct = 0.0;  // (baseline - deshadowed) / baseline * 100
};

struct ImageEval {
    std::string stem;
    bool skipped = false;
    std::string skip_reason;
    std::map<std::string, LayerMetrics> layers;
    // Present when the dataset carries ground truth.
    bool has_restoration = false;
    double shadowed_mae = 0.0;
    double deshadowed_mae = 0.0;
    double mae_improvement_pct = 0.0;
    double deshadowed_psnr_db = 0.0;
    double unmasked_mae = 0.0;  // deshadowed vs ground truth outside the mask
};

struct Aggregate {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct EvalReport {
    static constexpr int kSchemaVersion = 1;
    std::vector<ImageEval> images;
    int evaluated = 0;
    int skipped = 0;
    // Keyed by layer name then metric: "baseline", "deshadowed",
    // "compensated", "improvement_pct".
    std::map<std::string, std::map<std::string, Aggregate>> aggregate;
    std::optional<Aggregate> mae_improvement;
    std::optional<Aggregate> unmasked_mae;
    double mean_infer_ms_per_image = 0.0;
    bool with_compensation = false;
    CompensationParams compensation;

    void write(const std::filesystem::path& out_dir) const;  // report.json + report.csv
};

struct EvalOptions {
    bool with_compensation = false;
    int image_size = 512;  // remover input size
    int batch = 2;
    bool emit_profiles = true;
};

EvalReport build_report(const std::vector<DatasetEntry>& entries, Remover& remover,
                        const std::map<std::string, std::vector<RegionOfInterest>>& rois,
                        const std::filesystem::path& out_dir, const EvalOptions& options);

}  // namespace deshadow
