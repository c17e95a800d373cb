// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/attention.hpp"
#include "srsr/guidance.hpp"
#include "srsr/image_io.hpp"
#include "srsr/mask.hpp"
#include "srsr/tokenizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srsr {

struct LayerSpec {
    Resolution resolution;
    std::size_t heads = 1;
    std::size_t head_dim = 4;

    std::size_t model_dim() const { return heads * head_dim; }
};

/// Shape and seeding of the toy cross-attention denoiser. Every layer
/// resolution must divide the base resolution (features are block-averaged
/// down and nearest-upsampled back). At least two distinct resolutions are
/// required so mask resampling is always exercised.
struct DenoiserSpec {
    std::size_t latent_channels = 4;
    Resolution base_resolution{8, 8};
    std::vector<LayerSpec> layers = {
        {{8, 8}, 2, 8},
        {{4, 4}, 2, 8},
        {{8, 8}, 2, 8},
    };
    std::size_t token_dim = 16;
    std::size_t decode_upscale = 4;
    std::uint64_t seed = 0;

    void validate() const;
    std::vector<Resolution> layer_resolutions() const;
};

struct LayerWeights {
    Matrix wq; // [(channels + 1) x model_dim], +1 is the timestep input
    Matrix wk; // [token_dim x model_dim]
    Matrix wv; // [token_dim x model_dim]
    Matrix wo; // [model_dim x channels]
};

struct DenoiserWeights {
    std::vector<LayerWeights> layers;
    Matrix decoder_w;              // [channels x 3]
    std::vector<double> decoder_b; // [3]
    Matrix encoder_w;              // [3 x channels]
    std::vector<double> encoder_b; // [channels]

    std::uint64_t checksum() const;
};

/// Deterministic weight init: every matrix gets its own labelled stream
/// derived from spec.seed, filled row-major with uniform(-a, a), a =
/// 1/sqrt(fan_in). Same seed, same bytes, on any platform.
DenoiserWeights init_weights(const DenoiserSpec& spec);

/// Reverse-diffusion schedule with per-step DDIM coefficients:
/// x_{t-1} = signal_coeff * x_t + eps_coeff * eps_hat.
struct SamplerSchedule {
    std::size_t num_steps = 0;
    std::vector<int> timesteps;        // descending, T..1
    std::vector<double> alpha_bar;     // alpha_bar[t] for t = 0..T
    std::vector<double> signal_coeff;  // one per step
    std::vector<double> eps_coeff;     // one per step

    void validate() const;
};

SamplerSchedule make_schedule(std::size_t num_steps);

/// Attention weights captured for one layer of one conditional forward pass.
struct LayerAttention {
    Resolution resolution;
    std::vector<Matrix> head_raw;    // post-softmax, row-stochastic
    std::vector<Matrix> head_masked; // after binary masking (empty when unmasked)
    std::vector<Matrix> head_final;  // the weights that produced the output
};

struct ForwardCapture {
    std::vector<LayerAttention> layers;
};

/// One forward pass of the toy denoiser. `t_norm` is timestep/T in (0, 1].
/// When `masks` is non-null every layer's resolution must have an entry and
/// attention runs re-focused; when null all layers run plain attention.
NoiseField forward(const NoiseField& latent, double t_norm, const Matrix& token_embeddings,
                   const DenoiserWeights& weights, const DenoiserSpec& spec,
                   const std::map<Resolution, TokenPixelMask>* masks, RenormMode mode,
                   ForwardCapture* capture = nullptr);

struct RunConfig {
    DenoiserSpec denoiser;
    SamplerSchedule schedule;
    GuidanceConfig guidance;
    bool srca_enabled = false;
    RenormMode renorm_mode = RenormMode::PerPixel;
    MaskProducts masks;
    std::uint64_t noise_seed = 0;
    bool unconditional_only = false; // baseline mode: eps_hat = eps_uncond, no cond pass
    bool capture_attention = false;
    std::optional<NoiseField> init_signal; // encoded input at the latent resolution
};

struct StepDiagnostics {
    int timestep = 0;
    NoiseField eps_uncond;
    NoiseField eps_cond; // empty in unconditional-only runs
    NoiseField eps_blended;
    NoiseField latent_after;
    ForwardCapture cond_attention; // populated when capture_attention is set
};

struct RunDiagnostics {
    std::vector<StepDiagnostics> steps;
};

struct SampleResult {
    NoiseField final_latent;
    RunDiagnostics diagnostics;
};

/// Runs the full reverse loop: per step one unconditional and (unless
/// unconditional_only) one conditional forward pass, blended with cfg or
/// stcfg, then the deterministic DDIM update. Throws NumericError naming the
/// step if the latent stops being finite.
SampleResult reverse_sample(const RunConfig& config, const Matrix& cond_embeddings,
                            const Matrix& uncond_embeddings);

/// Fixed seeded linear map from latent channels to RGB, clamped to [0, 1],
/// then nearest-upsampled by spec.decode_upscale.
ImageGrid decode(const NoiseField& latent, const DenoiserWeights& weights,
                 const DenoiserSpec& spec);

/// Inverse-direction helper for conditioning: image (1 or 3 channels, any
/// declared range) block-averaged to the base resolution and linearly mapped
/// into latent channels.
NoiseField encode_image(const ImageGrid& image, const DenoiserWeights& weights,
                        const DenoiserSpec& spec);

struct HeatmapGrid {
    std::size_t step_index = 0;
    int timestep = 0;
    std::size_t layer_index = 0;
    Resolution resolution;
    std::vector<double> values; // display-normalized to [0, 1]
};

/// Per-pixel attention mass for one tag's token span, averaged over heads,
/// max-normalized per map. `step` selects one step index; nullopt = all.
std::vector<HeatmapGrid> export_attention_maps(const RunDiagnostics& diagnostics,
                                               const TokenLayout& layout,
                                               const std::string& tag,
                                               std::optional<std::size_t> step = std::nullopt);

/// Same, selecting tokens directly by span instead of by tag name.
std::vector<HeatmapGrid> export_attention_maps(const RunDiagnostics& diagnostics,
                                               TokenSpan span,
                                               std::optional<std::size_t> step = std::nullopt);

} // namespace srsr
