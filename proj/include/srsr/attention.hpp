// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/tensor.hpp"

#include <cstdint>
#include <vector>

namespace srsr {

struct Resolution {
    std::size_t h = 0;
    std::size_t w = 0;

    std::size_t pixels() const { return h * w; }
    friend bool operator==(const Resolution&, const Resolution&) = default;
    friend auto operator<=>(const Resolution&, const Resolution&) = default;
};

/// Query/key/value triple for one cross-attention call. `scale` defaults to
/// 1/sqrt(d) when left at zero.
struct AttentionInputs {
    Matrix queries; // [num_pixels x d]
    Matrix keys;    // [num_tokens x d]
    Matrix values;  // [num_tokens x d_v]
    double scale = 0.0;

    double effective_scale() const;
};

enum class WeightNormalization : std::uint8_t {
    RowStochastic, // each pixel row sums to 1
    GlobalSumOne,  // all entries sum to 1
    Unnormalized,
};

struct AttentionWeights {
    Matrix weights; // [num_pixels x num_tokens]
    WeightNormalization normalization = WeightNormalization::Unnormalized;
};

/// Binary pixel-token visibility matrix at one attention resolution.
/// Construction rejects any pixel row without a single visible token, so a
/// softmax renormalization downstream can never divide by zero.
class TokenPixelMask {
public:
    TokenPixelMask(std::vector<std::uint8_t> entries, std::size_t num_pixels,
                   std::size_t num_tokens, Resolution resolution);

    std::uint8_t at(std::size_t pixel, std::size_t token) const {
        return entries_[pixel * num_tokens_ + token];
    }
    std::size_t num_pixels() const { return num_pixels_; }
    std::size_t num_tokens() const { return num_tokens_; }
    const Resolution& resolution() const { return resolution_; }
    const std::vector<std::uint8_t>& entries() const { return entries_; }

private:
    std::vector<std::uint8_t> entries_;
    std::size_t num_pixels_ = 0;
    std::size_t num_tokens_ = 0;
    Resolution resolution_;
};

enum class RenormMode : std::uint8_t {
    PerPixel, // each surviving row rescaled to sum 1
    Global,   // every entry divided by the grand sum
};

struct AttentionResult {
    Matrix output; // [num_pixels x d_v]
    AttentionWeights weights;
};

/// Plain scaled-dot-product cross-attention. Softmax rows use
/// max-subtraction; weights come back row-stochastic.
AttentionResult scaled_dot_attention(const AttentionInputs& inputs);

/// Zeroes weights wherever the mask is 0 (elementwise product with the
/// binary mask). The result is tagged unnormalized.
AttentionWeights apply_token_pixel_mask(const AttentionWeights& weights,
                                        const TokenPixelMask& mask);

/// Rescales masked weights back onto a probability simplex, either per pixel
/// row or across the whole matrix.
AttentionWeights renormalize(const AttentionWeights& masked, RenormMode mode);

/// Spatially re-focused cross-attention: softmax, mask, renormalize, then
/// the weighted sum with the values.
AttentionResult srca_attention(const AttentionInputs& inputs, const TokenPixelMask& mask,
                               RenormMode mode);

} // namespace srsr
