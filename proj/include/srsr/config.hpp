// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>

namespace srsr {

/// Central numeric tolerances. Tests and runtime checks pull from here so a
/// tolerance is never duplicated as a magic literal.
struct Tolerances {
    double row_sum = 1e-6;          // softmax rows must sum to 1 within this
    double mask_identity = 1e-12;   // all-ones-mask attention vs unmasked
    double renorm_oracle = 1e-10;   // renormalization vs brute-force oracle
    double baseline_forward = 1e-9; // masked-with-ones forward vs baseline
    double psnr_oracle_db = 1e-9;   // PSNR vs pixel-loop oracle
    double ssim_oracle = 1e-7;      // SSIM vs sliding-window oracle
    double symmetry = 1e-12;        // metric symmetry checks
};

inline constexpr Tolerances kTolerances{};

/// Luma conversion used before SSIM on multichannel images (BT.601).
inline constexpr std::array<double, 3> kLumaWeights = {0.299, 0.587, 0.114};

/// SSIM reference settings.
struct SsimParams {
    std::size_t window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
};

/// Grounding confidence threshold used when a manifest does not override it.
inline constexpr double kDefaultConfidenceThreshold = 0.25;

/// Conventional guidance scale for latent-diffusion pipelines.
inline constexpr double kDefaultGuidanceScale = 5.5;

/// Default reverse-diffusion step count.
inline constexpr std::size_t kDefaultSteps = 8;

} // namespace srsr
