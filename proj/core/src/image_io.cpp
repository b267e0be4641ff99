#include "deshadow/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace deshadow {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

void require_supported(const std::filesystem::path& path) {
    if (!is_supported_image_path(path))
        throw FormatError("unsupported image format '" + path.extension().string() +
                          "' (lossless single-channel PNG or TIFF required): " + path.string());
}

cv::Mat read_single_channel(const std::filesystem::path& path, double* max_code) {
    require_supported(path);
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) throw IoError("cannot decode image: " + path.string());
    if (raw.channels() != 1)
        throw FormatError("expected single-channel raster, got " + std::to_string(raw.channels()) +
                          " channels: " + path.string());
    switch (raw.depth()) {
        case CV_8U: *max_code = 255.0; break;
        case CV_16U: *max_code = 65535.0; break;
        default:
            throw FormatError("expected 8- or 16-bit raster: " + path.string());
    }
    return raw;
}

}  // namespace

bool is_supported_image_path(const std::filesystem::path& path) {
    const std::string ext = lower_ext(path);
    return ext == ".png" || ext == ".tif" || ext == ".tiff";
}

BScan load_image(const std::filesystem::path& path) {
    double max_code = 0.0;
    cv::Mat raw = read_single_channel(path, &max_code);

    BScan scan;
    scan.pixels = Image(raw.rows, raw.cols);
    scan.source_id = path.stem().string();
    scan.is_normalized = true;
    for (int r = 0; r < raw.rows; ++r) {
        for (int c = 0; c < raw.cols; ++c) {
            const double code = raw.depth() == CV_8U ? static_cast<double>(raw.at<std::uint8_t>(r, c))
                                                     : static_cast<double>(raw.at<std::uint16_t>(r, c));
            scan.pixels.at(r, c) = code / max_code;
        }
    }
    validate(scan);
    return scan;
}

void save_image(const BScan& img, const std::filesystem::path& path, int bit_depth) {
    require_supported(path);
    if (bit_depth != 8 && bit_depth != 16)
        throw ValidationError("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
    validate(img);
    if (!img.is_normalized)
        throw ValidationError("save_image requires a normalized scan: " + img.source_id);

    const double max_code = bit_depth == 8 ? 255.0 : 65535.0;
    cv::Mat out(img.height(), img.width(), bit_depth == 8 ? CV_8UC1 : CV_16UC1);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            const double code = std::round(std::clamp(img.pixels.at(r, c), 0.0, 1.0) * max_code);
            if (bit_depth == 8)
                out.at<std::uint8_t>(r, c) = static_cast<std::uint8_t>(code);
            else
                out.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(code);
        }
    }
    if (!cv::imwrite(path.string(), out))
        throw IoError("cannot write image: " + path.string());
}

ShadowMask load_mask(const std::filesystem::path& path) {
    double max_code = 0.0;
    cv::Mat raw = read_single_channel(path, &max_code);

    ShadowMask mask;
    mask.kind = MaskKind::ground_truth_binary;
    mask.values = Image(raw.rows, raw.cols);
    std::size_t offending = 0;
    for (int r = 0; r < raw.rows; ++r) {
        for (int c = 0; c < raw.cols; ++c) {
            const double code = raw.depth() == CV_8U ? static_cast<double>(raw.at<std::uint8_t>(r, c))
                                                     : static_cast<double>(raw.at<std::uint16_t>(r, c));
            if (code != 0.0 && code != max_code) ++offending;
            mask.values.at(r, c) = code > max_code / 2.0 ? 1.0 : 0.0;
        }
    }
    if (offending > 0)
        throw ValidationError("mask is not binary: " + std::to_string(offending) +
                              " pixel(s) neither 0 nor max in " + path.string());
    return mask;
}

void save_mask(const ShadowMask& mask, const std::filesystem::path& path) {
    require_supported(path);
    validate(mask);
    cv::Mat out(mask.values.rows, mask.values.cols, CV_8UC1);
    for (int r = 0; r < mask.values.rows; ++r)
        for (int c = 0; c < mask.values.cols; ++c)
            out.at<std::uint8_t>(r, c) =
                static_cast<std::uint8_t>(std::round(std::clamp(mask.values.at(r, c), 0.0, 1.0) * 255.0));
    if (!cv::imwrite(path.string(), out))
        throw IoError("cannot write mask: " + path.string());
}

}  // namespace deshadow
