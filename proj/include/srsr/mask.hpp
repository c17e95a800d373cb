// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/attention.hpp"
#include "srsr/tokenizer.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace srsr {

/// Flat binary H x W grid. Values are 0/1 only.
struct BinaryGrid {
    std::size_t h = 0;
    std::size_t w = 0;
    std::vector<std::uint8_t> v;

    BinaryGrid() = default;
    BinaryGrid(std::size_t height, std::size_t width, std::uint8_t fill = 0)
        : h(height), w(width), v(height * width, fill) {}

    std::uint8_t at(std::size_t r, std::size_t c) const { return v[r * w + c]; }
    void set(std::size_t r, std::size_t c, std::uint8_t val) { v[r * w + c] = val; }
    Resolution resolution() const { return {h, w}; }
    std::size_t count_ones() const;
    double coverage() const; // fraction of 1 cells

    friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;
};

/// One grounded tag: its token span, spatial mask at the base latent
/// resolution, and the grounding confidence.
struct TagMaskPair {
    std::string tag;
    TokenSpan token_span;
    BinaryGrid mask;
    double confidence = 0.0;
};

/// Pixels no retained tag covers (1 = ungrounded).
struct UngroundedMask {
    BinaryGrid mask;
    Resolution resolution() const { return mask.resolution(); }
};

enum class ResamplePolicy : std::uint8_t {
    AnyCoverage, // block max-pool: 1 if any source cell in the block is 1
    Majority,    // 1 if at least half the block is 1 (ties round to 1)
    Nearest,     // nearest-neighbour sample, works for any dims
};

/// Keeps exactly the pairs whose confidence is >= threshold, in order.
std::vector<TagMaskPair> filter_by_confidence(const std::vector<TagMaskPair>& pairs,
                                              double threshold);

/// Elementwise OR of all pair masks; empty input gives an all-zeros grid.
BinaryGrid union_grounded(const std::vector<TagMaskPair>& pairs, Resolution resolution);

/// Complement of a grounded-union grid.
UngroundedMask build_ungrounded_mask(const BinaryGrid& grounded_union);

/// Resamples a binary grid to the target resolution. Block policies require
/// the source dims to be integer multiples of the target dims.
BinaryGrid resample_mask(const BinaryGrid& mask, Resolution target, ResamplePolicy policy);

/// Assembles the pixel-token visibility matrix for one attention resolution:
/// global tokens are visible everywhere, span tokens only inside their tag's
/// (resampled) mask, all remaining tokens nowhere.
TokenPixelMask build_token_pixel_mask(const std::vector<TagMaskPair>& pairs,
                                      const TokenLayout& layout, Resolution resolution,
                                      ResamplePolicy policy = ResamplePolicy::AnyCoverage);

/// Per-resolution mask products for a denoiser run. The ungrounded mask at
/// each resolution is recomputed as the complement of the union of the
/// resampled grounded masks, never resampled from the base complement.
struct MaskProducts {
    std::map<Resolution, TokenPixelMask> attention_masks;
    std::map<Resolution, UngroundedMask> ungrounded;
    BinaryGrid base_union; // grounded union at the base resolution
};

MaskProducts build_mask_products(const std::vector<TagMaskPair>& pairs,
                                 const TokenLayout& layout,
                                 const std::vector<Resolution>& resolutions,
                                 Resolution base_resolution, ResamplePolicy policy);

} // namespace srsr
