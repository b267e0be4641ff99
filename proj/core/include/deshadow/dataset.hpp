#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deshadow/image.hpp"

namespace deshadow {

// Paired directory layout: <dir>/images and <dir>/masks hold rasters with
// identical stem filenames; <dir>/ground_truth is optional (phantom runs).
// A manifest.tsv (one stem per line) restricts and orders the set when
// present; otherwise stems are taken from images/ in sorted order.
struct DatasetEntry {
    std::string stem;
    std::filesystem::path image;
    std::filesystem::path mask;          // empty when masks are not required
    std::filesystem::path ground_truth;  // empty when absent
};

std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& dir,
                                       bool require_masks = true);

// Entry loaded into memory at native size.
struct TrainSample {
    std::string stem;
    Image image;
    Image mask;
};

std::vector<TrainSample> load_samples(const std::vector<DatasetEntry>& entries);

}  // namespace deshadow
