#include "deshadow/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "deshadow/errors.hpp"
#include "deshadow/image_io.hpp"

namespace deshadow {

namespace {

std::map<std::string, std::filesystem::path> index_rasters(const std::filesystem::path& dir) {
    std::map<std::string, std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (!is_supported_image_path(entry.path())) continue;
        out[entry.path().stem().string()] = entry.path();
    }
    return out;
}

}  // namespace

std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& dir, bool require_masks) {
    const auto images_dir = dir / "images";
    if (!std::filesystem::is_directory(images_dir))
        throw IoError("dataset has no images/ directory: " + dir.string());

    const auto images = index_rasters(images_dir);
    const auto masks = index_rasters(dir / "masks");
    const auto truths = index_rasters(dir / "ground_truth");
    if (images.empty()) throw ValidationError("dataset images/ holds no PNG/TIFF files: " + dir.string());

    std::vector<std::string> stems;
    const auto manifest = dir / "manifest.tsv";
    if (std::filesystem::exists(manifest)) {
        std::ifstream in(manifest);
        if (!in) throw IoError("cannot read dataset manifest: " + manifest.string());
        std::string line;
        while (std::getline(in, line)) {
            // first tab-separated field is the stem
            const auto tab = line.find('\t');
            std::string stem = tab == std::string::npos ? line : line.substr(0, tab);
            while (!stem.empty() && (stem.back() == '\r' || stem.back() == ' ')) stem.pop_back();
            if (!stem.empty()) stems.push_back(stem);
        }
    } else {
        for (const auto& [stem, _] : images) stems.push_back(stem);
    }

    std::vector<DatasetEntry> entries;
    for (const std::string& stem : stems) {
        const auto img = images.find(stem);
        if (img == images.end())
            throw ValidationError("dataset manifest names missing image stem: " + stem);
        DatasetEntry e;
        e.stem = stem;
        e.image = img->second;
        if (const auto m = masks.find(stem); m != masks.end()) e.mask = m->second;
        if (require_masks && e.mask.empty())
            throw ValidationError("image '" + stem + "' has no matching mask raster");
        if (const auto t = truths.find(stem); t != truths.end()) e.ground_truth = t->second;
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<TrainSample> load_samples(const std::vector<DatasetEntry>& entries) {
    std::vector<TrainSample> samples;
    samples.reserve(entries.size());
    for (const DatasetEntry& e : entries) {
        TrainSample s;
        s.stem = e.stem;
        s.image = load_image(e.image).pixels;
        if (e.mask.empty()) throw ValidationError("training sample '" + e.stem + "' needs a mask");
        const ShadowMask mask = load_mask(e.mask);
        if (mask.values.rows != s.image.rows || mask.values.cols != s.image.cols)
            throw ValidationError("mask shape differs from image for '" + e.stem + "'");
        s.mask = mask.values;
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace deshadow
