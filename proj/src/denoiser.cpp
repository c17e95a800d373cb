// SPDX-License-Identifier: Apache-2.0
#include "srsr/denoiser.hpp"

#include "srsr/errors.hpp"
#include "srsr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace srsr {

void DenoiserSpec::validate() const {
    if (latent_channels == 0) throw ConfigError("latent_channels must be >= 1");
    if (base_resolution.h == 0 || base_resolution.w == 0)
        throw ConfigError("base resolution must be >= 1x1");
    if (token_dim == 0) throw ConfigError("token_dim must be >= 1");
    if (decode_upscale == 0) throw ConfigError("decode_upscale must be >= 1");
    if (layers.empty()) throw ConfigError("denoiser needs at least one layer");
    std::set<Resolution> distinct;
    for (const auto& layer : layers) {
        if (layer.heads == 0 || layer.head_dim == 0)
            throw ConfigError("layer heads and head_dim must be >= 1");
        if (layer.resolution.h == 0 || layer.resolution.w == 0)
            throw ConfigError("layer resolution must be >= 1x1");
        if (base_resolution.h % layer.resolution.h != 0 ||
            base_resolution.w % layer.resolution.w != 0)
            throw ConfigError("layer resolution " + std::to_string(layer.resolution.h) + "x" +
                              std::to_string(layer.resolution.w) +
                              " does not divide the base resolution");
        distinct.insert(layer.resolution);
    }
    if (distinct.size() < 2)
        throw ConfigError("layer specs must span at least two distinct resolutions");
}

std::vector<Resolution> DenoiserSpec::layer_resolutions() const {
    std::vector<Resolution> out;
    for (const auto& layer : layers) out.push_back(layer.resolution);
    return out;
}

namespace {

Matrix uniform_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols,
                      std::size_t fan_in) {
    Matrix m(rows, cols);
    Xoshiro256ss rng(seed);
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : m.values()) v = rng.uniform(-a, a);
    return m;
}

std::vector<double> uniform_vector(std::uint64_t seed, std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    Xoshiro256ss rng(seed);
    for (double& v : out) v = rng.uniform(lo, hi);
    return out;
}

} // namespace

DenoiserWeights init_weights(const DenoiserSpec& spec) {
    spec.validate();
    DenoiserWeights w;
    const std::size_t c = spec.latent_channels;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& layer = spec.layers[i];
        const std::size_t md = layer.model_dim();
        const std::string prefix = "layer" + std::to_string(i) + "/";
        LayerWeights lw;
        lw.wq = uniform_matrix(derive_seed(spec.seed, prefix + "wq"), c + 1, md, c + 1);
        lw.wk = uniform_matrix(derive_seed(spec.seed, prefix + "wk"), spec.token_dim, md,
                               spec.token_dim);
        lw.wv = uniform_matrix(derive_seed(spec.seed, prefix + "wv"), spec.token_dim, md,
                               spec.token_dim);
        lw.wo = uniform_matrix(derive_seed(spec.seed, prefix + "wo"), md, c, md);
        w.layers.push_back(std::move(lw));
    }
    w.decoder_w = uniform_matrix(derive_seed(spec.seed, "decoder/w"), c, 3, c);
    w.decoder_b = uniform_vector(derive_seed(spec.seed, "decoder/b"), 3, 0.25, 0.75);
    w.encoder_w = uniform_matrix(derive_seed(spec.seed, "encoder/w"), 3, c, 3);
    w.encoder_b = uniform_vector(derive_seed(spec.seed, "encoder/b"), c, -0.1, 0.1);
    return w;
}

std::uint64_t DenoiserWeights::checksum() const {
    Digest d;
    for (const auto& layer : layers) {
        d.update(layer.wq.values());
        d.update(layer.wk.values());
        d.update(layer.wv.values());
        d.update(layer.wo.values());
    }
    d.update(decoder_w.values());
    d.update(decoder_b);
    d.update(encoder_w.values());
    d.update(encoder_b);
    return d.value();
}

void SamplerSchedule::validate() const {
    if (num_steps == 0) throw ConfigError("schedule needs at least one step");
    if (timesteps.size() != num_steps || signal_coeff.size() != num_steps ||
        eps_coeff.size() != num_steps || alpha_bar.size() != num_steps + 1)
        throw ConfigError("schedule arrays are inconsistent with num_steps");
    for (std::size_t i = 1; i < timesteps.size(); ++i)
        if (timesteps[i] >= timesteps[i - 1])
            throw ConfigError("timesteps must strictly descend");
    double amplification = 1.0;
    for (std::size_t i = 0; i < num_steps; ++i) {
        if (!std::isfinite(signal_coeff[i]) || !std::isfinite(eps_coeff[i]))
            throw ConfigError("schedule coefficients must be finite");
        amplification *= std::fabs(signal_coeff[i]);
    }
    // bounded predictions must yield a bounded final latent
    if (amplification > 100.0)
        throw ConfigError("schedule amplifies the latent by " + std::to_string(amplification) +
                          "; not a contraction");
}

SamplerSchedule make_schedule(std::size_t num_steps) {
    if (num_steps == 0) throw ConfigError("schedule needs at least one step");
    SamplerSchedule s;
    s.num_steps = num_steps;
    const double hi = 0.999, lo = 0.1;
    for (std::size_t t = 0; t <= num_steps; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(num_steps);
        s.alpha_bar.push_back(hi + (lo - hi) * u);
    }
    for (std::size_t k = 0; k < num_steps; ++k) {
        const int t = static_cast<int>(num_steps - k);
        const double at = s.alpha_bar[static_cast<std::size_t>(t)];
        const double ap = s.alpha_bar[static_cast<std::size_t>(t - 1)];
        // DDIM: x_{t-1} = sqrt(ap)*x0 + sqrt(1-ap)*eps with
        //       x0 = (x_t - sqrt(1-at)*eps)/sqrt(at), folded into two coefficients
        const double signal = std::sqrt(ap / at);
        const double eps = std::sqrt(1.0 - ap) - signal * std::sqrt(1.0 - at);
        s.timesteps.push_back(t);
        s.signal_coeff.push_back(signal);
        s.eps_coeff.push_back(eps);
    }
    s.validate();
    return s;
}

namespace {

// per-channel block average from the base resolution to a layer resolution
std::vector<double> pool_features(const NoiseField& h, Resolution target) {
    const std::size_t fh = h.h / target.h;
    const std::size_t fw = h.w / target.w;
    std::vector<double> pooled(h.channels * target.pixels());
    const double inv = 1.0 / static_cast<double>(fh * fw);
    for (std::size_t c = 0; c < h.channels; ++c)
        for (std::size_t y = 0; y < target.h; ++y)
            for (std::size_t x = 0; x < target.w; ++x) {
                double acc = 0.0;
                for (std::size_t dy = 0; dy < fh; ++dy)
                    for (std::size_t dx = 0; dx < fw; ++dx)
                        acc += h.at(c, y * fh + dy, x * fw + dx);
                pooled[(c * target.h + y) * target.w + x] = acc * inv;
            }
    return pooled;
}

Matrix slice_cols(const Matrix& m, std::size_t first, std::size_t count) {
    Matrix out(m.rows(), count);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, first + c);
    return out;
}

} // namespace

NoiseField forward(const NoiseField& latent, double t_norm, const Matrix& token_embeddings,
                   const DenoiserWeights& weights, const DenoiserSpec& spec,
                   const std::map<Resolution, TokenPixelMask>* masks, RenormMode mode,
                   ForwardCapture* capture) {
    if (latent.channels != spec.latent_channels ||
        latent.resolution() != spec.base_resolution)
        throw DimensionError("forward: latent does not match the denoiser spec");
    if (token_embeddings.cols() != spec.token_dim)
        throw DimensionError("forward: token embedding dim " +
                             std::to_string(token_embeddings.cols()) + " != token_dim " +
                             std::to_string(spec.token_dim));
    if (weights.layers.size() != spec.layers.size())
        throw ConfigError("forward: weights were initialized for a different spec");
    if (masks) {
        for (const auto& layer : spec.layers) {
            auto it = masks->find(layer.resolution);
            if (it == masks->end())
                throw ConfigError("forward: no attention mask for layer resolution " +
                                  std::to_string(layer.resolution.h) + "x" +
                                  std::to_string(layer.resolution.w));
            if (it->second.num_tokens() != token_embeddings.rows())
                throw ConfigError("forward: attention mask token count disagrees with the "
                                  "embedding table");
        }
    }

    const std::size_t channels = spec.latent_channels;
    NoiseField h = latent;
    for (std::size_t li = 0; li < spec.layers.size(); ++li) {
        const LayerSpec& layer = spec.layers[li];
        const LayerWeights& lw = weights.layers[li];
        const Resolution res = layer.resolution;
        const std::size_t pixels = res.pixels();
        const std::size_t dh = layer.head_dim;

        const std::vector<double> pooled = pool_features(h, res);
        Matrix qin(pixels, channels + 1);
        for (std::size_t p = 0; p < pixels; ++p) {
            for (std::size_t c = 0; c < channels; ++c) qin(p, c) = pooled[c * pixels + p];
            qin(p, channels) = t_norm;
        }
        const Matrix q_all = matmul(qin, lw.wq);
        const Matrix k_all = matmul(token_embeddings, lw.wk);
        const Matrix v_all = matmul(token_embeddings, lw.wv);

        LayerAttention* cap = nullptr;
        if (capture) {
            capture->layers.push_back({});
            cap = &capture->layers.back();
            cap->resolution = res;
        }

        Matrix concat(pixels, layer.model_dim());
        for (std::size_t head = 0; head < layer.heads; ++head) {
            AttentionInputs in;
            in.queries = slice_cols(q_all, head * dh, dh);
            in.keys = slice_cols(k_all, head * dh, dh);
            in.values = slice_cols(v_all, head * dh, dh);

            AttentionResult result;
            if (masks) {
                const TokenPixelMask& mask = masks->at(res);
                AttentionResult plain = scaled_dot_attention(in);
                AttentionWeights masked = apply_token_pixel_mask(plain.weights, mask);
                AttentionWeights refocused = renormalize(masked, mode);
                result.output = matmul(refocused.weights, in.values);
                if (cap) {
                    cap->head_raw.push_back(plain.weights.weights);
                    cap->head_masked.push_back(masked.weights);
                    cap->head_final.push_back(refocused.weights);
                }
                result.weights = std::move(refocused);
            } else {
                result = scaled_dot_attention(in);
                if (cap) {
                    cap->head_raw.push_back(result.weights.weights);
                    cap->head_final.push_back(result.weights.weights);
                }
            }
            for (std::size_t p = 0; p < pixels; ++p)
                for (std::size_t c = 0; c < dh; ++c)
                    concat(p, head * dh + c) = result.output(p, c);
        }

        const Matrix delta = matmul(concat, lw.wo); // [pixels x channels]
        const std::size_t fh = spec.base_resolution.h / res.h;
        const std::size_t fw = spec.base_resolution.w / res.w;
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t y = 0; y < spec.base_resolution.h; ++y)
                for (std::size_t x = 0; x < spec.base_resolution.w; ++x)
                    h.at(c, y, x) += delta((y / fh) * res.w + (x / fw), c);
    }
    h.kind = NoiseKind::Conditional;
    return h;
}

namespace {

NoiseField initial_latent(const RunConfig& config) {
    const Resolution res = config.denoiser.base_resolution;
    const std::size_t channels = config.denoiser.latent_channels;
    NoiseField x(channels, res.h, res.w);
    Xoshiro256ss rng(derive_seed(config.noise_seed, "init_noise"));
    const std::vector<double> noise = rng.normal_vector(x.values.size());
    const double at = config.schedule.alpha_bar.back();
    const double signal_w = std::sqrt(at);
    const double noise_w = std::sqrt(1.0 - at);
    if (config.init_signal) {
        const NoiseField& sig = *config.init_signal;
        if (sig.channels != channels || sig.resolution() != res)
            throw DimensionError("init_signal does not match the latent resolution");
        for (std::size_t i = 0; i < x.values.size(); ++i)
            x.values[i] = signal_w * sig.values[i] + noise_w * noise[i];
    } else {
        for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] = noise_w * noise[i];
    }
    return x;
}

void validate_run(const RunConfig& config, const Matrix& cond_embeddings,
                  const Matrix& uncond_embeddings) {
    config.denoiser.validate();
    config.schedule.validate();
    if (!(config.guidance.scale >= 1.0)) throw ConfigError("guidance scale must be >= 1");
    if (cond_embeddings.cols() != config.denoiser.token_dim ||
        uncond_embeddings.cols() != config.denoiser.token_dim)
        throw DimensionError("token embeddings do not match token_dim");
    if (config.srca_enabled) {
        for (const auto& layer : config.denoiser.layers) {
            auto it = config.masks.attention_masks.find(layer.resolution);
            if (it == config.masks.attention_masks.end())
                throw ConfigError("missing attention mask for layer resolution " +
                                  std::to_string(layer.resolution.h) + "x" +
                                  std::to_string(layer.resolution.w));
            if (it->second.resolution() != layer.resolution)
                throw ConfigError("attention mask resolution mismatch");
        }
    }
    if (config.guidance.stcfg_enabled && !config.unconditional_only) {
        auto it = config.masks.ungrounded.find(config.denoiser.base_resolution);
        if (it == config.masks.ungrounded.end())
            throw ConfigError("stcfg needs the ungrounded mask at the latent resolution");
    }
}

} // namespace

SampleResult reverse_sample(const RunConfig& config, const Matrix& cond_embeddings,
                            const Matrix& uncond_embeddings) {
    validate_run(config, cond_embeddings, uncond_embeddings);
    const DenoiserWeights weights = init_weights(config.denoiser);
    const double total = static_cast<double>(config.schedule.num_steps);

    SampleResult result;
    NoiseField x = initial_latent(config);
    for (std::size_t k = 0; k < config.schedule.num_steps; ++k) {
        const int t = config.schedule.timesteps[k];
        const double t_norm = static_cast<double>(t) / total;

        StepDiagnostics step;
        step.timestep = t;
        step.eps_uncond =
            forward(x, t_norm, uncond_embeddings, weights, config.denoiser, nullptr,
                    config.renorm_mode);
        step.eps_uncond.kind = NoiseKind::Unconditional;

        if (config.unconditional_only) {
            step.eps_blended = step.eps_uncond;
            step.eps_blended.kind = NoiseKind::Blended;
        } else {
            ForwardCapture* cap = config.capture_attention ? &step.cond_attention : nullptr;
            step.eps_cond = forward(
                x, t_norm, cond_embeddings, weights, config.denoiser,
                config.srca_enabled ? &config.masks.attention_masks : nullptr,
                config.renorm_mode, cap);
            step.eps_cond.kind = NoiseKind::Conditional;
            if (config.guidance.stcfg_enabled) {
                const UngroundedMask& ung =
                    config.masks.ungrounded.at(config.denoiser.base_resolution);
                step.eps_blended =
                    stcfg(step.eps_uncond, step.eps_cond, config.guidance.scale, ung);
            } else {
                step.eps_blended = cfg(step.eps_uncond, step.eps_cond, config.guidance.scale);
            }
        }

        const double sc = config.schedule.signal_coeff[k];
        const double ec = config.schedule.eps_coeff[k];
        for (std::size_t i = 0; i < x.values.size(); ++i)
            x.values[i] = sc * x.values[i] + ec * step.eps_blended.values[i];
        if (!all_finite(x.values))
            throw NumericError("latent diverged at step " + std::to_string(k) +
                               " (timestep " + std::to_string(t) + ")");

        step.latent_after = x;
        result.diagnostics.steps.push_back(std::move(step));
    }
    result.final_latent = x;
    return result;
}

ImageGrid decode(const NoiseField& latent, const DenoiserWeights& weights,
                 const DenoiserSpec& spec) {
    if (latent.channels != spec.latent_channels ||
        latent.resolution() != spec.base_resolution)
        throw DimensionError("decode: latent does not match the denoiser spec");
    if (!all_finite(latent.values)) throw NumericError("decode: non-finite latent");

    const std::size_t f = spec.decode_upscale;
    ImageGrid out(3, latent.h * f, latent.w * f, 1.0);
    for (std::size_t y = 0; y < latent.h; ++y)
        for (std::size_t x = 0; x < latent.w; ++x)
            for (std::size_t o = 0; o < 3; ++o) {
                double v = weights.decoder_b[o];
                for (std::size_t c = 0; c < latent.channels; ++c)
                    v += latent.at(c, y, x) * weights.decoder_w(c, o);
                v = std::clamp(v, 0.0, 1.0);
                for (std::size_t dy = 0; dy < f; ++dy)
                    for (std::size_t dx = 0; dx < f; ++dx)
                        out.at(o, y * f + dy, x * f + dx) = v;
            }
    return out;
}

NoiseField encode_image(const ImageGrid& image, const DenoiserWeights& weights,
                        const DenoiserSpec& spec) {
    if (image.channels != 1 && image.channels != 3)
        throw ConfigError("encode_image expects 1 or 3 channels");
    const Resolution base = spec.base_resolution;
    if (image.h % base.h != 0 || image.w % base.w != 0)
        throw ConfigError("input image dims must be integer multiples of the latent "
                          "resolution");
    const std::size_t fh = image.h / base.h;
    const std::size_t fw = image.w / base.w;
    const double range = image.max_value;
    const double inv = 1.0 / static_cast<double>(fh * fw);

    NoiseField latent(spec.latent_channels, base.h, base.w);
    for (std::size_t y = 0; y < base.h; ++y)
        for (std::size_t x = 0; x < base.w; ++x) {
            double rgb[3] = {0.0, 0.0, 0.0};
            for (std::size_t o = 0; o < 3; ++o) {
                const std::size_t src = image.channels == 3 ? o : 0;
                double acc = 0.0;
                for (std::size_t dy = 0; dy < fh; ++dy)
                    for (std::size_t dx = 0; dx < fw; ++dx)
                        acc += image.at(src, y * fh + dy, x * fw + dx);
                rgb[o] = acc * inv / range;
            }
            for (std::size_t c = 0; c < spec.latent_channels; ++c) {
                double v = weights.encoder_b[c];
                for (std::size_t o = 0; o < 3; ++o) v += rgb[o] * weights.encoder_w(o, c);
                latent.at(c, y, x) = v;
            }
        }
    return latent;
}

std::vector<HeatmapGrid> export_attention_maps(const RunDiagnostics& diagnostics,
                                               const TokenLayout& layout,
                                               const std::string& tag,
                                               std::optional<std::size_t> step) {
    auto span_it = layout.tag_spans.find(tag);
    if (span_it == layout.tag_spans.end())
        throw SelectorError("unknown tag '" + tag + "'");
    return export_attention_maps(diagnostics, span_it->second, step);
}

std::vector<HeatmapGrid> export_attention_maps(const RunDiagnostics& diagnostics,
                                               TokenSpan span,
                                               std::optional<std::size_t> step) {
    if (span.first > span.last) throw SelectorError("empty token span");
    if (step && *step >= diagnostics.steps.size())
        throw SelectorError("step " + std::to_string(*step) + " out of range");

    std::vector<HeatmapGrid> maps;
    for (std::size_t si = 0; si < diagnostics.steps.size(); ++si) {
        if (step && si != *step) continue;
        const StepDiagnostics& sd = diagnostics.steps[si];
        if (sd.cond_attention.layers.empty())
            throw ConfigError("run did not capture attention; enable capture_attention");
        for (std::size_t li = 0; li < sd.cond_attention.layers.size(); ++li) {
            const LayerAttention& la = sd.cond_attention.layers[li];
            HeatmapGrid map;
            map.step_index = si;
            map.timestep = sd.timestep;
            map.layer_index = li;
            map.resolution = la.resolution;
            map.values.assign(la.resolution.pixels(), 0.0);

            const double head_count = static_cast<double>(la.head_final.size());
            for (const Matrix& head : la.head_final) {
                if (span.last >= head.cols())
                    throw SelectorError("token span exceeds the token count");
                for (std::size_t p = 0; p < map.values.size(); ++p) {
                    double mass = 0.0;
                    for (std::size_t j = span.first; j <= span.last; ++j) mass += head(p, j);
                    map.values[p] += mass / head_count;
                }
            }
            double max_v = 0.0;
            for (double v : map.values) max_v = std::max(max_v, v);
            if (max_v > 0.0)
                for (double& v : map.values) v /= max_v;
            maps.push_back(std::move(map));
        }
    }
    return maps;
}

} // namespace srsr
