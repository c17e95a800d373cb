// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/mask.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace srsr {

/// Channel-major image, values in [0, max_value]. max_value is 1.0 for
/// unit-range float images and 255.0 for 8-bit content.
struct ImageGrid {
    std::size_t channels = 0;
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<double> values; // ((c * h + y) * w + x)
    double max_value = 1.0;

    ImageGrid() = default;
    ImageGrid(std::size_t c, std::size_t height, std::size_t width, double maxv = 1.0)
        : channels(c), h(height), w(width), values(c * height * width, 0.0), max_value(maxv) {}

    double at(std::size_t c, std::size_t y, std::size_t x) const {
        return values[(c * h + y) * w + x];
    }
    double& at(std::size_t c, std::size_t y, std::size_t x) {
        return values[(c * h + y) * w + x];
    }
    Resolution resolution() const { return {h, w}; }
    bool same_shape(const ImageGrid& o) const {
        return channels == o.channels && h == o.h && w == o.w;
    }
};

/// Reads a binary PGM (P5, one channel) or PPM (P6, three channels) file
/// with maxval 255 into an 8-bit-range grid.
ImageGrid read_netpbm(const std::filesystem::path& path);

/// Writes a grid as binary PGM/PPM. The grid must have 1 or 3 channels;
/// unit-range grids are quantized with round(v * 255).
void write_netpbm(const std::filesystem::path& path, const ImageGrid& image);

/// Converts a unit-range image to 8-bit range by round(v * 255); images
/// already in 8-bit range pass through unchanged.
ImageGrid quantize_to_u8(const ImageGrid& image);

/// Reads an 8-bit single-channel mask image; nonzero pixels become 1.
BinaryGrid read_mask_image(const std::filesystem::path& path);

/// Writes a binary grid as PGM with 0/255 pixels.
void write_mask_image(const std::filesystem::path& path, const BinaryGrid& mask);

} // namespace srsr
