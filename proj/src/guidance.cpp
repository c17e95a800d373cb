// SPDX-License-Identifier: Apache-2.0
#include "srsr/guidance.hpp"

#include "srsr/errors.hpp"

#include <string>

namespace srsr {

namespace {

// shared by cfg and the grounded branch of stcfg so the two stay bit-identical
inline double guided_blend(double uncond, double cond, double s) {
    return uncond + s * (cond - uncond);
}

void check_pair(const NoiseField& uncond, const NoiseField& cond, double s) {
    if (!uncond.same_shape(cond))
        throw DimensionError("guidance: conditional and unconditional fields differ in shape");
    if (!(s >= 1.0))
        throw ConfigError("guidance scale must be >= 1, got " + std::to_string(s));
}

} // namespace

GuidanceConfig make_guidance_config(double scale, bool stcfg_enabled) {
    if (!(scale >= 1.0))
        throw ConfigError("guidance scale must be >= 1, got " + std::to_string(scale));
    return {scale, stcfg_enabled};
}

NoiseField cfg(const NoiseField& uncond, const NoiseField& cond, double s) {
    check_pair(uncond, cond, s);
    NoiseField out(uncond.channels, uncond.h, uncond.w, NoiseKind::Blended);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = guided_blend(uncond.values[i], cond.values[i], s);
    return out;
}

NoiseField stcfg(const NoiseField& uncond, const NoiseField& cond, double s,
                 const UngroundedMask& ungrounded) {
    check_pair(uncond, cond, s);
    if (ungrounded.resolution() != uncond.resolution())
        throw DimensionError("stcfg: ungrounded mask is not at the latent resolution");
    NoiseField out(uncond.channels, uncond.h, uncond.w, NoiseKind::Blended);
    const std::size_t plane = uncond.h * uncond.w;
    for (std::size_t c = 0; c < uncond.channels; ++c) {
        const std::size_t base = c * plane;
        for (std::size_t p = 0; p < plane; ++p) {
            const std::size_t i = base + p;
            out.values[i] = ungrounded.mask.v[p]
                                ? uncond.values[i]
                                : guided_blend(uncond.values[i], cond.values[i], s);
        }
    }
    return out;
}

} // namespace srsr
