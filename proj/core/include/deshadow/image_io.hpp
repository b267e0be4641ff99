#pragma once

#include <filesystem>

#include "deshadow/image.hpp"

namespace deshadow {

// Lossless single-channel PNG/TIFF only. Lossy formats would corrupt the
// shadow intensity statistics and are rejected up front by extension.
bool is_supported_image_path(const std::filesystem::path& path);

// Reads an 8- or 16-bit single-channel raster and rescales intensities to
// [0,1] by dividing by the format maximum. source_id is the file stem.
BScan load_image(const std::filesystem::path& path);

// Quantizes to the requested bit depth (rounding to nearest code) and writes
// a single-channel raster. load(save(x)) differs from x by at most
// 1/(2^bit_depth - 1) per pixel.
void save_image(const BScan& img, const std::filesystem::path& path, int bit_depth = 16);

// Reads a strictly binary raster (pixels 0 or the format max). Any
// intermediate gray value is a validation error reporting the offending
// pixel count. Masks are conventionally stored 8-bit {0,255}.
ShadowMask load_mask(const std::filesystem::path& path);

// Writes a mask as an 8-bit {0,255} raster; soft masks are written as
// rounded 8-bit gray.
void save_mask(const ShadowMask& mask, const std::filesystem::path& path);

}  // namespace deshadow
