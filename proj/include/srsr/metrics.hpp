// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/config.hpp"
#include "srsr/image_io.hpp"
#include "srsr/mask.hpp"

#include <string>

namespace srsr {

/// PSNR with an explicit infinity sentinel so identical images never turn
/// into a floating-point overflow downstream.
struct PsnrValue {
    double db = 0.0;
    bool infinite = false;

    std::string str() const;
    friend bool operator==(const PsnrValue&, const PsnrValue&) = default;
};

PsnrValue psnr(const ImageGrid& a, const ImageGrid& b, double max_val);

/// Mean local SSIM over all fully valid windows, Gaussian-weighted.
/// Multichannel images are converted to luma (kLumaWeights) first.
double ssim(const ImageGrid& a, const ImageGrid& b, const SsimParams& params = {});

/// PSNR restricted to pixels with region = 1.
PsnrValue region_psnr(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                      double max_val);

/// SSIM restricted to windows that lie entirely inside the region.
double region_ssim(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                   const SsimParams& params = {});

/// Extracts the luma plane (or the single channel) as an h x w image.
ImageGrid to_luma(const ImageGrid& image);

enum class MetricKind : std::uint8_t { Psnr, Ssim };

struct MetricValue {
    double value = 0.0;
    bool infinite = false; // only PSNR can be infinite
};

/// Selector-dispatched region metric (PSNR over masked pixels, SSIM over
/// windows fully inside the region).
MetricValue region_metric(const ImageGrid& a, const ImageGrid& b, const BinaryGrid& region,
                          MetricKind kind, double max_val = 255.0,
                          const SsimParams& params = {});

} // namespace srsr
