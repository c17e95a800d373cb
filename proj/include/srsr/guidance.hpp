// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/mask.hpp"

#include <cstdint>
#include <vector>

namespace srsr {

enum class NoiseKind : std::uint8_t { Conditional, Unconditional, Blended };

/// Per-pixel, per-channel noise prediction on the latent grid.
struct NoiseField {
    std::size_t channels = 0;
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<double> values; // channel-major: ((c * h + y) * w + x)
    NoiseKind kind = NoiseKind::Conditional;

    NoiseField() = default;
    NoiseField(std::size_t c, std::size_t height, std::size_t width,
               NoiseKind k = NoiseKind::Conditional)
        : channels(c), h(height), w(width), values(c * height * width, 0.0), kind(k) {}

    double at(std::size_t c, std::size_t y, std::size_t x) const {
        return values[(c * h + y) * w + x];
    }
    double& at(std::size_t c, std::size_t y, std::size_t x) {
        return values[(c * h + y) * w + x];
    }
    Resolution resolution() const { return {h, w}; }
    bool same_shape(const NoiseField& o) const {
        return channels == o.channels && h == o.h && w == o.w;
    }
};

struct GuidanceConfig {
    double scale = 1.0;
    bool stcfg_enabled = false;
};

/// Validates s >= 1 (throws ConfigError otherwise).
GuidanceConfig make_guidance_config(double scale, bool stcfg_enabled);

/// Classifier-free guidance: uncond + s * (cond - uncond), elementwise.
NoiseField cfg(const NoiseField& uncond, const NoiseField& cond, double s);

/// Spatially targeted variant: ungrounded pixels (mask = 1) take the
/// unconditional prediction verbatim; grounded pixels get the standard
/// guided blend. The mask is broadcast across channels.
NoiseField stcfg(const NoiseField& uncond, const NoiseField& cond, double s,
                 const UngroundedMask& ungrounded);

} // namespace srsr
