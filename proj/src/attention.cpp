// SPDX-License-Identifier: Apache-2.0
#include "srsr/attention.hpp"

#include "srsr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace srsr {

double AttentionInputs::effective_scale() const {
    if (scale > 0.0) return scale;
    return 1.0 / std::sqrt(static_cast<double>(queries.cols()));
}

TokenPixelMask::TokenPixelMask(std::vector<std::uint8_t> entries, std::size_t num_pixels,
                               std::size_t num_tokens, Resolution resolution)
    : entries_(std::move(entries)),
      num_pixels_(num_pixels),
      num_tokens_(num_tokens),
      resolution_(resolution) {
    if (num_pixels_ == 0 || num_tokens_ == 0)
        throw DimensionError("TokenPixelMask: empty dimensions");
    if (entries_.size() != num_pixels_ * num_tokens_)
        throw DimensionError("TokenPixelMask: entry count does not match dimensions");
    if (resolution_.pixels() != num_pixels_)
        throw DimensionError("TokenPixelMask: resolution does not cover the pixel count");
    for (std::uint8_t e : entries_)
        if (e > 1) throw DimensionError("TokenPixelMask: entries must be 0 or 1");
    for (std::size_t p = 0; p < num_pixels_; ++p) {
        bool any = false;
        for (std::size_t t = 0; t < num_tokens_ && !any; ++t) any = at(p, t) != 0;
        if (!any)
            throw DegenerateMaskError("pixel row " + std::to_string(p) +
                                      " masks out every token");
    }
}

static void check_attention_shapes(const AttentionInputs& in) {
    if (in.queries.rows() == 0 || in.queries.cols() == 0)
        throw DimensionError("attention: queries are empty");
    if (in.keys.rows() == 0)
        throw DimensionError("attention: keys are empty");
    if (in.queries.cols() != in.keys.cols())
        throw DimensionError("attention: query dim " + std::to_string(in.queries.cols()) +
                             " vs key dim " + std::to_string(in.keys.cols()));
    if (in.values.rows() != in.keys.rows())
        throw DimensionError("attention: token counts of keys and values disagree");
    if (!all_finite(in.queries) || !all_finite(in.keys) || !all_finite(in.values))
        throw NumericError("attention: non-finite input entries");
    if (!(in.effective_scale() > 0.0) || !std::isfinite(in.effective_scale()))
        throw NumericError("attention: scale must be positive and finite");
}

AttentionResult scaled_dot_attention(const AttentionInputs& inputs) {
    check_attention_shapes(inputs);
    const std::size_t pixels = inputs.queries.rows();
    const std::size_t tokens = inputs.keys.rows();
    const double scale = inputs.effective_scale();

    Matrix scores = matmul_nt(inputs.queries, inputs.keys);
    Matrix weights(pixels, tokens);
    for (std::size_t i = 0; i < pixels; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < tokens; ++j) row_max = std::max(row_max, scale * scores(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < tokens; ++j) {
            const double e = std::exp(scale * scores(i, j) - row_max);
            weights(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < tokens; ++j) weights(i, j) /= sum;
    }

    AttentionWeights tagged{std::move(weights), WeightNormalization::RowStochastic};
    Matrix output = matmul(tagged.weights, inputs.values);
    return {std::move(output), std::move(tagged)};
}

AttentionWeights apply_token_pixel_mask(const AttentionWeights& weights,
                                        const TokenPixelMask& mask) {
    if (weights.weights.rows() != mask.num_pixels() ||
        weights.weights.cols() != mask.num_tokens())
        throw DimensionError("apply_token_pixel_mask: weight and mask shapes disagree");
    Matrix out = weights.weights;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j)
            if (mask.at(i, j) == 0) out(i, j) = 0.0;
    return {std::move(out), WeightNormalization::Unnormalized};
}

AttentionWeights renormalize(const AttentionWeights& masked, RenormMode mode) {
    Matrix out = masked.weights;
    if (mode == RenormMode::PerPixel) {
        for (std::size_t i = 0; i < out.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < out.cols(); ++j) sum += out(i, j);
            if (sum == 0.0)
                throw DegenerateMaskError("renormalize: pixel row " + std::to_string(i) +
                                          " has zero weight mass");
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) /= sum;
        }
        return {std::move(out), WeightNormalization::RowStochastic};
    }
    double grand = 0.0;
    for (double v : out.values()) grand += v;
    if (grand == 0.0)
        throw DegenerateMaskError("renormalize: zero total weight mass");
    for (double& v : out.values()) v /= grand;
    return {std::move(out), WeightNormalization::GlobalSumOne};
}

AttentionResult srca_attention(const AttentionInputs& inputs, const TokenPixelMask& mask,
                               RenormMode mode) {
    AttentionResult plain = scaled_dot_attention(inputs);
    AttentionWeights masked = apply_token_pixel_mask(plain.weights, mask);
    AttentionWeights refocused = renormalize(masked, mode);
    Matrix output = matmul(refocused.weights, inputs.values);
    return {std::move(output), std::move(refocused)};
}

} // namespace srsr
