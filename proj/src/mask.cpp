// SPDX-License-Identifier: Apache-2.0
#include "srsr/mask.hpp"

#include "srsr/errors.hpp"

#include <string>

namespace srsr {

std::size_t BinaryGrid::count_ones() const {
    std::size_t n = 0;
    for (std::uint8_t b : v) n += b ? 1u : 0u;
    return n;
}

double BinaryGrid::coverage() const {
    if (v.empty()) return 0.0;
    return static_cast<double>(count_ones()) / static_cast<double>(v.size());
}

std::vector<TagMaskPair> filter_by_confidence(const std::vector<TagMaskPair>& pairs,
                                              double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ConfigError("confidence threshold must lie in [0, 1], got " +
                          std::to_string(threshold));
    std::vector<TagMaskPair> kept;
    for (const auto& p : pairs)
        if (p.confidence >= threshold) kept.push_back(p);
    return kept;
}

BinaryGrid union_grounded(const std::vector<TagMaskPair>& pairs, Resolution resolution) {
    BinaryGrid out(resolution.h, resolution.w, 0);
    for (const auto& p : pairs) {
        if (p.mask.resolution() != resolution)
            throw DimensionError("union_grounded: mask for tag '" + p.tag + "' is " +
                                 std::to_string(p.mask.h) + "x" + std::to_string(p.mask.w) +
                                 ", expected " + std::to_string(resolution.h) + "x" +
                                 std::to_string(resolution.w));
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] |= p.mask.v[i];
    }
    return out;
}

UngroundedMask build_ungrounded_mask(const BinaryGrid& grounded_union) {
    BinaryGrid out(grounded_union.h, grounded_union.w);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = grounded_union.v[i] ? 0 : 1;
    return {out};
}

namespace {

BinaryGrid resample_nearest(const BinaryGrid& mask, Resolution target) {
    BinaryGrid out(target.h, target.w);
    for (std::size_t r = 0; r < target.h; ++r) {
        // integer-only centre sampling; identical dims reduce to the identity
        const std::size_t sr = ((2 * r + 1) * mask.h) / (2 * target.h);
        for (std::size_t c = 0; c < target.w; ++c) {
            const std::size_t sc = ((2 * c + 1) * mask.w) / (2 * target.w);
            out.set(r, c, mask.at(sr, sc));
        }
    }
    return out;
}

BinaryGrid resample_blocks(const BinaryGrid& mask, Resolution target, bool majority) {
    if (target.h == 0 || target.w == 0)
        throw ResampleError("target resolution must be >= 1x1");
    if (mask.h % target.h != 0 || mask.w % target.w != 0)
        throw ResampleError("block resample needs source dims divisible by target dims (" +
                            std::to_string(mask.h) + "x" + std::to_string(mask.w) + " -> " +
                            std::to_string(target.h) + "x" + std::to_string(target.w) + ")");
    const std::size_t bh = mask.h / target.h;
    const std::size_t bw = mask.w / target.w;
    BinaryGrid out(target.h, target.w);
    for (std::size_t r = 0; r < target.h; ++r)
        for (std::size_t c = 0; c < target.w; ++c) {
            std::size_t ones = 0;
            for (std::size_t dr = 0; dr < bh; ++dr)
                for (std::size_t dc = 0; dc < bw; ++dc)
                    ones += mask.at(r * bh + dr, c * bw + dc) ? 1u : 0u;
            const bool on = majority ? (2 * ones >= bh * bw) : (ones > 0);
            out.set(r, c, on ? 1 : 0);
        }
    return out;
}

} // namespace

BinaryGrid resample_mask(const BinaryGrid& mask, Resolution target, ResamplePolicy policy) {
    if (target.h == 0 || target.w == 0)
        throw ResampleError("target resolution must be >= 1x1");
    if (mask.resolution() == target) return mask;
    switch (policy) {
        case ResamplePolicy::AnyCoverage: return resample_blocks(mask, target, false);
        case ResamplePolicy::Majority: return resample_blocks(mask, target, true);
        case ResamplePolicy::Nearest: return resample_nearest(mask, target);
    }
    throw ConfigError("unknown resample policy");
}

TokenPixelMask build_token_pixel_mask(const std::vector<TagMaskPair>& pairs,
                                      const TokenLayout& layout, Resolution resolution,
                                      ResamplePolicy policy) {
    const std::size_t pixels = resolution.pixels();
    const std::size_t tokens = layout.num_tokens();
    if (pixels == 0 || tokens == 0)
        throw ConfigError("build_token_pixel_mask: empty resolution or token sequence");

    std::vector<std::uint8_t> entries(pixels * tokens, 0);
    for (std::size_t j : layout.global_token_indices)
        for (std::size_t i = 0; i < pixels; ++i) entries[i * tokens + j] = 1;

    for (const auto& pair : pairs) {
        auto it = layout.tag_spans.find(pair.tag);
        if (it == layout.tag_spans.end())
            throw ConfigError("tag '" + pair.tag + "' has no span in the token layout");
        if (it->second != pair.token_span)
            throw ConfigError("tag '" + pair.tag + "' span disagrees with the token layout");
        const BinaryGrid local = resample_mask(pair.mask, resolution, policy);
        for (std::size_t i = 0; i < pixels; ++i) {
            if (!local.v[i]) continue;
            for (std::size_t j = pair.token_span.first; j <= pair.token_span.last; ++j)
                entries[i * tokens + j] = 1;
        }
    }
    return TokenPixelMask(std::move(entries), pixels, tokens, resolution);
}

MaskProducts build_mask_products(const std::vector<TagMaskPair>& pairs,
                                 const TokenLayout& layout,
                                 const std::vector<Resolution>& resolutions,
                                 Resolution base_resolution, ResamplePolicy policy) {
    MaskProducts out;
    out.base_union = union_grounded(pairs, base_resolution);
    for (const Resolution& res : resolutions) {
        if (out.attention_masks.count(res)) continue;
        out.attention_masks.emplace(res, build_token_pixel_mask(pairs, layout, res, policy));
        BinaryGrid local_union(res.h, res.w);
        for (const auto& pair : pairs) {
            const BinaryGrid local = resample_mask(pair.mask, res, policy);
            for (std::size_t i = 0; i < local_union.v.size(); ++i)
                local_union.v[i] |= local.v[i];
        }
        out.ungrounded.emplace(res, build_ungrounded_mask(local_union));
    }
    return out;
}

} // namespace srsr
