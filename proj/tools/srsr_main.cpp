// SPDX-License-Identifier: Apache-2.0
//
// srsr: spatially re-focused super-resolution toy pipeline.
//
//   srsr run     --manifest M [overrides]     run one pipeline configuration
//   srsr sweep   --manifest M [--thresholds]  grounding-threshold sweep
//   srsr compare --a DIR --b DIR [--out F]    diff two finished runs
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error,
//             4 numeric divergence, 1 anything else.

#include "srsr/errors.hpp"
#include "srsr/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct RunOverrides {
    std::optional<std::string> srca, stcfg, renorm, resample;
    std::optional<std::string> scale;
    std::optional<double> threshold;
    std::optional<std::size_t> steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool export_attn = false;
};

bool parse_on_off(const std::string& v, const char* flag) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw srsr::ConfigError(std::string(flag) + " must be 'on' or 'off', got '" + v + "'");
}

void apply_overrides(srsr::PipelineManifest& manifest, const RunOverrides& ovr) {
    if (ovr.srca) manifest.run.srca = parse_on_off(*ovr.srca, "--srca");
    if (ovr.stcfg) manifest.run.stcfg = parse_on_off(*ovr.stcfg, "--stcfg");
    if (ovr.renorm) {
        if (*ovr.renorm == "per-pixel" || *ovr.renorm == "per_pixel")
            manifest.run.renorm = srsr::RenormMode::PerPixel;
        else if (*ovr.renorm == "global")
            manifest.run.renorm = srsr::RenormMode::Global;
        else
            throw srsr::ConfigError("--renorm must be per-pixel or global");
    }
    if (ovr.resample) {
        if (*ovr.resample == "any")
            manifest.run.resample = srsr::ResamplePolicy::AnyCoverage;
        else if (*ovr.resample == "majority")
            manifest.run.resample = srsr::ResamplePolicy::Majority;
        else if (*ovr.resample == "nearest")
            manifest.run.resample = srsr::ResamplePolicy::Nearest;
        else
            throw srsr::ConfigError("--resample must be any, majority or nearest");
    }
    if (ovr.threshold) manifest.run.threshold = *ovr.threshold;
    if (ovr.scale) {
        try {
            // stod so 'inf' parses; an infinite scale is in-domain (s >= 1)
            // and surfaces downstream as numeric divergence
            manifest.run.guidance_scale = std::stod(*ovr.scale);
        } catch (const std::exception&) {
            throw srsr::ConfigError("--scale must be a number, got '" + *ovr.scale + "'");
        }
    }
    if (ovr.steps) manifest.run.steps = *ovr.steps;
    if (ovr.seed) manifest.run.seed = *ovr.seed;
    if (ovr.export_attn) manifest.run.export_attention = true;
    if (ovr.out_dir) manifest.output_dir = *ovr.out_dir;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"spatially re-focused super-resolution toy pipeline"};
    app.require_subcommand(1);

    std::string manifest_path;
    RunOverrides ovr;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", manifest_path, "pipeline manifest (JSON)")->required();
        cmd->add_option("--out", ovr.out_dir, "override the output directory");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one pipeline configuration");
    add_common(run_cmd);
    run_cmd->add_option("--srca", ovr.srca, "re-focused cross-attention {on,off}");
    run_cmd->add_option("--stcfg", ovr.stcfg, "spatially targeted guidance {on,off}");
    run_cmd->add_option("--renorm", ovr.renorm, "renormalization {per-pixel,global}");
    run_cmd->add_option("--threshold", ovr.threshold, "grounding confidence threshold");
    run_cmd->add_option("--steps", ovr.steps, "reverse diffusion steps");
    run_cmd->add_option("--scale", ovr.scale, "guidance scale (>= 1)");
    run_cmd->add_option("--seed", ovr.seed, "noise seed");
    run_cmd->add_flag("--export-attn", ovr.export_attn, "write attention heatmaps");
    run_cmd->add_option("--resample", ovr.resample, "mask resampling {any,majority,nearest}");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "grounding-threshold sweep");
    add_common(sweep_cmd);
    std::string thresholds_arg;
    sweep_cmd->add_option("--thresholds", thresholds_arg,
                          "comma-separated thresholds (defaults to the manifest's sweep block)");

    CLI::App* compare_cmd = app.add_subcommand("compare", "diff two finished runs");
    std::string dir_a, dir_b, report_out;
    compare_cmd->add_option("--a", dir_a, "first run directory")->required();
    compare_cmd->add_option("--b", dir_b, "second run directory")->required();
    compare_cmd->add_option("--out", report_out, "write the diff report JSON here");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        srsr::PipelineManifest manifest = srsr::load_manifest(manifest_path);
        apply_overrides(manifest, ovr);
        const srsr::RunArtifacts artifacts = srsr::run_pipeline(manifest);
        std::printf("run complete: %s\n", artifacts.dir.string().c_str());
        std::printf("  retained tags      %zu\n", artifacts.retained_tags);
        std::printf("  grounded coverage  %.4f\n", artifacts.grounded_coverage);
        if (artifacts.metrics) {
            if (artifacts.metrics->psnr)
                std::printf("  psnr_db            %s\n", artifacts.metrics->psnr->str().c_str());
            if (artifacts.metrics->ssim)
                std::printf("  ssim               %.6f\n", *artifacts.metrics->ssim);
        }
        return kExitOk;
    }

    if (sweep_cmd->parsed()) {
        srsr::PipelineManifest manifest = srsr::load_manifest(manifest_path);
        apply_overrides(manifest, ovr);
        std::vector<double> thresholds = manifest.sweep_thresholds;
        if (!thresholds_arg.empty()) {
            thresholds.clear();
            std::stringstream ss(thresholds_arg);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    thresholds.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw srsr::ConfigError("bad threshold '" + item + "' in --thresholds");
                }
            }
        }
        const srsr::SweepReport report = srsr::threshold_sweep(manifest, thresholds);
        std::printf("threshold  retained  coverage\n");
        for (const auto& row : report.rows)
            std::printf("%.4f     %-9zu %.4f\n", row.threshold, row.retained_tags,
                        row.coverage);
        return kExitOk;
    }

    std::optional<std::filesystem::path> report_path;
    if (!report_out.empty()) report_path = report_out;
    const srsr::CompareReport report = srsr::compare_runs(dir_a, dir_b, report_path);
    std::printf("restored identical:     %s\n", report.restored_identical ? "yes" : "no");
    std::printf("final latent identical: %s\n", report.final_latent_identical ? "yes" : "no");
    std::printf("regions comparable:     %s\n", report.regions_comparable ? "yes" : "no");
    auto print_delta = [](const char* name, const std::optional<srsr::RegionDelta>& d) {
        if (d)
            std::printf("step-1 %s: max |d eps| = %.3e%s\n", name, d->max_abs_eps_delta,
                        d->bit_identical ? " (bit-identical)" : "");
    };
    print_delta("grounded  ", report.grounded);
    print_delta("ungrounded", report.ungrounded);
    if (report.psnr_delta_db) std::printf("psnr delta (b-a): %+.4f dB\n", *report.psnr_delta_db);
    if (report.ssim_delta) std::printf("ssim delta (b-a): %+.6f\n", *report.ssim_delta);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const srsr::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const srsr::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const srsr::Error& e) {
        // config, dimension, mask, resample, selector, comparison: all usage errors
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOther;
    }
}
