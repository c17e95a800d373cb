// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/config.hpp"
#include "srsr/denoiser.hpp"
#include "srsr/metrics.hpp"
#include "srsr/tagfile.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace srsr {

enum class PsnrColor : std::uint8_t { Rgb, Luma };

/// Everything one pipeline invocation needs beyond the input files.
struct RunSettings {
    std::size_t steps = kDefaultSteps;
    double guidance_scale = kDefaultGuidanceScale;
    bool srca = true;
    bool stcfg = true;
    RenormMode renorm = RenormMode::PerPixel;
    double threshold = kDefaultConfidenceThreshold;
    ResamplePolicy resample = ResamplePolicy::AnyCoverage;
    std::uint64_t seed = 0;
    bool export_attention = false;
    bool unconditional_only = false;
    PsnrColor psnr_color = PsnrColor::Rgb;
    DenoiserSpec denoiser;
};

struct PipelineManifest {
    std::filesystem::path input_image;
    std::filesystem::path tag_file;
    std::filesystem::path output_dir;
    std::optional<std::filesystem::path> reference_image;
    std::vector<std::string> metric_selection = {"psnr", "ssim"};
    RunSettings run;
    std::vector<double> sweep_thresholds; // empty unless the manifest has a sweep block
};

/// Parses a manifest JSON file; relative paths resolve against the
/// manifest's directory.
PipelineManifest load_manifest(const std::filesystem::path& path);

struct RegionMetrics {
    PsnrValue psnr;
    std::optional<double> ssim; // absent when no SSIM window fits the region
    std::size_t pixels = 0;
};

struct MetricsReport {
    PsnrColor psnr_color = PsnrColor::Rgb;
    std::optional<PsnrValue> psnr;
    std::optional<double> ssim;
    std::optional<RegionMetrics> grounded;
    std::optional<RegionMetrics> ungrounded;
};

struct RunArtifacts {
    std::filesystem::path dir;
    std::size_t retained_tags = 0;
    double grounded_coverage = 0.0; // union fraction at the base resolution
    std::uint64_t restored_checksum = 0;
    std::uint64_t final_latent_checksum = 0;
    std::optional<MetricsReport> metrics;
};

/// Runs the whole pipeline for one manifest: grounding, mask assembly,
/// sampling, decode, artifact and report writing. Deterministic given seeds.
RunArtifacts run_pipeline(const PipelineManifest& manifest);

struct SweepRow {
    double threshold = 0.0;
    std::size_t retained_tags = 0;
    double coverage = 0.0;
    std::optional<PsnrValue> psnr;
    std::optional<double> ssim;
};

struct SweepReport {
    std::vector<SweepRow> rows; // ascending by threshold

    /// Rows must be sorted ascending with non-increasing retained counts.
    void validate() const;
};

/// One full pipeline run per threshold (shared seeds), written to
/// output_dir/sweep/threshold_<t>/, plus sweep_report.{json,txt}.
SweepReport threshold_sweep(const PipelineManifest& manifest,
                            std::vector<double> thresholds);

struct RegionDelta {
    double max_abs_eps_delta = 0.0; // step-1 blended noise prediction
    bool bit_identical = false;
};

struct CompareReport {
    bool restored_identical = false;
    bool final_latent_identical = false;
    bool regions_comparable = false; // both runs share the same ungrounded mask
    std::optional<RegionDelta> grounded;
    std::optional<RegionDelta> ungrounded;
    std::optional<double> psnr_delta_db; // b - a, when both runs have finite PSNR
    std::optional<double> ssim_delta;
    std::optional<double> grounded_psnr_delta_db;
    std::optional<double> grounded_ssim_delta;
    std::optional<double> ungrounded_psnr_delta_db;
    std::optional<double> ungrounded_ssim_delta;
};

/// Diffs two run_pipeline output directories. Throws ComparisonError when
/// the runs' resolved configs are not comparable (different denoiser,
/// schedule length, or noise seed).
CompareReport compare_runs(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b,
                           const std::optional<std::filesystem::path>& report_path = {});

} // namespace srsr
