// SPDX-License-Identifier: Apache-2.0
#include "srsr/pipeline.hpp"

#include "srsr/errors.hpp"
#include "srsr/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

namespace srsr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json parse_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
}

void make_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_json_file(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

RenormMode renorm_from_string(const std::string& s) {
    if (s == "per_pixel" || s == "per-pixel") return RenormMode::PerPixel;
    if (s == "global") return RenormMode::Global;
    throw ConfigError("unknown renorm mode '" + s + "' (per_pixel|global)");
}

std::string renorm_to_string(RenormMode m) {
    return m == RenormMode::PerPixel ? "per_pixel" : "global";
}

ResamplePolicy resample_from_string(const std::string& s) {
    if (s == "any_coverage" || s == "any") return ResamplePolicy::AnyCoverage;
    if (s == "majority") return ResamplePolicy::Majority;
    if (s == "nearest") return ResamplePolicy::Nearest;
    throw ConfigError("unknown resample policy '" + s + "' (any_coverage|majority|nearest)");
}

std::string resample_to_string(ResamplePolicy p) {
    switch (p) {
        case ResamplePolicy::AnyCoverage: return "any_coverage";
        case ResamplePolicy::Majority: return "majority";
        case ResamplePolicy::Nearest: return "nearest";
    }
    return "any_coverage";
}

PsnrColor psnr_color_from_string(const std::string& s) {
    if (s == "rgb") return PsnrColor::Rgb;
    if (s == "luma") return PsnrColor::Luma;
    throw ConfigError("unknown psnr_color '" + s + "' (rgb|luma)");
}

std::string psnr_color_to_string(PsnrColor c) { return c == PsnrColor::Rgb ? "rgb" : "luma"; }

Resolution resolution_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(std::string(what) + " must be [height, width]");
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

DenoiserSpec denoiser_from_json(const json& j) {
    DenoiserSpec spec;
    if (j.contains("latent_channels")) spec.latent_channels = j["latent_channels"];
    if (j.contains("base_resolution"))
        spec.base_resolution = resolution_from_json(j["base_resolution"], "base_resolution");
    if (j.contains("token_dim")) spec.token_dim = j["token_dim"];
    if (j.contains("decode_upscale")) spec.decode_upscale = j["decode_upscale"];
    if (j.contains("weight_seed")) spec.seed = j["weight_seed"];
    if (j.contains("layers")) {
        spec.layers.clear();
        for (const auto& layer : j["layers"]) {
            LayerSpec ls;
            ls.resolution = resolution_from_json(layer.at("resolution"), "layer resolution");
            ls.heads = layer.value("heads", std::size_t{1});
            ls.head_dim = layer.value("head_dim", std::size_t{4});
            spec.layers.push_back(ls);
        }
    }
    spec.validate();
    return spec;
}

json denoiser_to_json(const DenoiserSpec& spec) {
    json layers = json::array();
    for (const auto& layer : spec.layers)
        layers.push_back({{"resolution", {layer.resolution.h, layer.resolution.w}},
                          {"heads", layer.heads},
                          {"head_dim", layer.head_dim}});
    return {{"latent_channels", spec.latent_channels},
            {"base_resolution", {spec.base_resolution.h, spec.base_resolution.w}},
            {"token_dim", spec.token_dim},
            {"decode_upscale", spec.decode_upscale},
            {"weight_seed", spec.seed},
            {"layers", layers}};
}

json settings_to_json(const RunSettings& run, const std::vector<std::string>& metric_sel) {
    return {{"steps", run.steps},
            {"guidance_scale", run.guidance_scale},
            {"srca", run.srca},
            {"stcfg", run.stcfg},
            {"renorm", renorm_to_string(run.renorm)},
            {"threshold", run.threshold},
            {"resample", resample_to_string(run.resample)},
            {"seed", run.seed},
            {"export_attention", run.export_attention},
            {"unconditional_only", run.unconditional_only},
            {"psnr_color", psnr_color_to_string(run.psnr_color)},
            {"metrics", metric_sel},
            {"denoiser", denoiser_to_json(run.denoiser)}};
}

std::string format_threshold(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", t);
    return buf;
}

std::uint64_t checksum_doubles(const std::vector<double>& values) {
    Digest d;
    d.update(values);
    return d.value();
}

std::uint64_t checksum_image_u8(const ImageGrid& u8) {
    Digest d;
    for (double v : u8.values) {
        const auto byte = static_cast<std::uint8_t>(v);
        d.update(&byte, 1);
    }
    return d.value();
}

// metric helpers over the quantized restored image and the reference

ImageGrid metric_view(const ImageGrid& img, PsnrColor color) {
    return color == PsnrColor::Luma ? to_luma(img) : img;
}

std::optional<RegionMetrics> region_report(const ImageGrid& a, const ImageGrid& b,
                                           const BinaryGrid& region, PsnrColor color,
                                           bool want_psnr, bool want_ssim) {
    const std::size_t pixels = region.count_ones();
    if (pixels == 0) return std::nullopt;
    RegionMetrics out;
    out.pixels = pixels;
    if (want_psnr)
        out.psnr = region_psnr(metric_view(a, color), metric_view(b, color), region, 255.0);
    if (want_ssim) {
        try {
            out.ssim = region_ssim(a, b, region);
        } catch (const RegionError&) {
            out.ssim = std::nullopt; // no full window fits; PSNR still stands
        }
    }
    return out;
}

json metrics_to_json(const MetricsReport& m) {
    auto psnr_json = [](const std::optional<PsnrValue>& p) -> json {
        if (!p) return nullptr;
        return {{"db", p->infinite ? json(nullptr) : json(p->db)}, {"infinite", p->infinite}};
    };
    auto region_json = [&](const std::optional<RegionMetrics>& r) -> json {
        if (!r) return nullptr;
        return {{"pixels", r->pixels},
                {"psnr", psnr_json(r->psnr)},
                {"ssim", r->ssim ? json(*r->ssim) : json(nullptr)}};
    };
    return {{"psnr_color", psnr_color_to_string(m.psnr_color)},
            {"psnr", psnr_json(m.psnr)},
            {"ssim", m.ssim ? json(*m.ssim) : json(nullptr)},
            {"regions",
             {{"grounded", region_json(m.grounded)}, {"ungrounded", region_json(m.ungrounded)}}}};
}

void write_metrics_txt(const fs::path& path, const MetricsReport& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    char line[128];
    out << "metric        value\n";
    if (m.psnr) {
        std::snprintf(line, sizeof(line), "%-13s %s\n", "psnr_db", m.psnr->str().c_str());
        out << line;
    }
    if (m.ssim) {
        std::snprintf(line, sizeof(line), "%-13s %.6f\n", "ssim", *m.ssim);
        out << line;
    }
    auto region_lines = [&](const char* name, const std::optional<RegionMetrics>& r) {
        if (!r) return;
        std::snprintf(line, sizeof(line), "%-13s pixels=%zu psnr=%s ssim=%s\n", name,
                      r->pixels, r->psnr.str().c_str(),
                      r->ssim ? std::to_string(*r->ssim).c_str() : "n/a");
        out << line;
    };
    region_lines("grounded", m.grounded);
    region_lines("ungrounded", m.ungrounded);
}

} // namespace

PipelineManifest load_manifest(const fs::path& path) {
    const json doc = parse_json_file(path);
    const fs::path dir = path.parent_path();
    auto resolve = [&](const std::string& p) { return dir / p; };

    PipelineManifest m;
    for (const char* field : {"input_image", "tag_file", "output_dir"})
        if (!doc.contains(field))
            throw ConfigError(path.string() + ": missing field '" + std::string(field) + "'");
    m.input_image = resolve(doc["input_image"].get<std::string>());
    m.tag_file = resolve(doc["tag_file"].get<std::string>());
    m.output_dir = resolve(doc["output_dir"].get<std::string>());
    if (doc.contains("reference_image"))
        m.reference_image = resolve(doc["reference_image"].get<std::string>());
    if (doc.contains("metrics")) {
        m.metric_selection.clear();
        for (const auto& sel : doc["metrics"]) {
            const std::string name = sel.get<std::string>();
            if (name != "psnr" && name != "ssim")
                throw ConfigError("unknown metric '" + name + "' (psnr|ssim)");
            m.metric_selection.push_back(name);
        }
    }
    if (doc.contains("run")) {
        const json& r = doc["run"];
        if (r.contains("steps")) m.run.steps = r["steps"];
        if (r.contains("guidance_scale")) m.run.guidance_scale = r["guidance_scale"];
        if (r.contains("srca")) m.run.srca = r["srca"];
        if (r.contains("stcfg")) m.run.stcfg = r["stcfg"];
        if (r.contains("renorm")) m.run.renorm = renorm_from_string(r["renorm"]);
        if (r.contains("threshold")) m.run.threshold = r["threshold"];
        if (r.contains("resample")) m.run.resample = resample_from_string(r["resample"]);
        if (r.contains("seed")) m.run.seed = r["seed"];
        if (r.contains("export_attention")) m.run.export_attention = r["export_attention"];
        if (r.contains("unconditional_only"))
            m.run.unconditional_only = r["unconditional_only"];
        if (r.contains("psnr_color")) m.run.psnr_color = psnr_color_from_string(r["psnr_color"]);
        if (r.contains("denoiser")) m.run.denoiser = denoiser_from_json(r["denoiser"]);
    }
    if (doc.contains("sweep")) {
        if (!doc["sweep"].contains("thresholds"))
            throw ConfigError("sweep block needs a 'thresholds' array");
        for (const auto& t : doc["sweep"]["thresholds"])
            m.sweep_thresholds.push_back(t.get<double>());
    }
    return m;
}

RunArtifacts run_pipeline(const PipelineManifest& manifest) {
    const RunSettings& settings = manifest.run;
    settings.denoiser.validate();
    if (settings.threshold < 0.0 || settings.threshold > 1.0)
        throw ConfigError("threshold must lie in [0, 1]");

    const TagFile tags = load_tag_file(manifest.tag_file, settings.denoiser.base_resolution);
    const ImageGrid input = read_netpbm(manifest.input_image);

    const auto retained = filter_by_confidence(tags.pairs, settings.threshold);
    std::vector<Resolution> resolutions = settings.denoiser.layer_resolutions();
    resolutions.push_back(settings.denoiser.base_resolution);
    const MaskProducts masks = build_mask_products(retained, tags.layout, resolutions,
                                                   settings.denoiser.base_resolution,
                                                   settings.resample);

    const Matrix cond_emb = token_embeddings(tags.layout.prompt_tokens,
                                             settings.denoiser.token_dim,
                                             settings.denoiser.seed);
    const Matrix uncond_emb = token_embeddings(tokenize_prompt(""),
                                               settings.denoiser.token_dim,
                                               settings.denoiser.seed);
    const DenoiserWeights weights = init_weights(settings.denoiser);

    RunConfig config;
    config.denoiser = settings.denoiser;
    config.schedule = make_schedule(settings.steps);
    config.guidance = make_guidance_config(settings.guidance_scale, settings.stcfg);
    config.srca_enabled = settings.srca;
    config.renorm_mode = settings.renorm;
    config.masks = masks;
    config.noise_seed = settings.seed;
    config.unconditional_only = settings.unconditional_only;
    config.capture_attention = settings.export_attention;
    config.init_signal = encode_image(input, weights, settings.denoiser);

    const SampleResult result = reverse_sample(config, cond_emb, uncond_emb);
    const ImageGrid restored = quantize_to_u8(decode(result.final_latent, weights,
                                                     settings.denoiser));

    make_output_dir(manifest.output_dir);
    write_netpbm(manifest.output_dir / "restored.ppm", restored);
    write_mask_image(manifest.output_dir / "grounded_union.pgm", masks.base_union);
    write_mask_image(manifest.output_dir / "ungrounded.pgm",
                     masks.ungrounded.at(settings.denoiser.base_resolution).mask);
    write_json_file(manifest.output_dir / "config_resolved.json",
                    settings_to_json(settings, manifest.metric_selection));

    // per-step machine-readable log
    json steps = json::array();
    for (std::size_t k = 0; k < result.diagnostics.steps.size(); ++k) {
        const StepDiagnostics& sd = result.diagnostics.steps[k];
        json entry = {{"index", k},
                      {"timestep", sd.timestep},
                      {"eps_uncond", sd.eps_uncond.values},
                      {"eps_blended", sd.eps_blended.values},
                      {"eps_uncond_checksum", to_hex(checksum_doubles(sd.eps_uncond.values))},
                      {"eps_blended_checksum", to_hex(checksum_doubles(sd.eps_blended.values))},
                      {"latent_checksum", to_hex(checksum_doubles(sd.latent_after.values))}};
        if (!sd.eps_cond.values.empty())
            entry["eps_cond_checksum"] = to_hex(checksum_doubles(sd.eps_cond.values));
        steps.push_back(std::move(entry));
    }
    RunArtifacts artifacts;
    artifacts.dir = manifest.output_dir;
    artifacts.retained_tags = retained.size();
    artifacts.grounded_coverage = masks.base_union.coverage();
    artifacts.restored_checksum = checksum_image_u8(restored);
    artifacts.final_latent_checksum = checksum_doubles(result.final_latent.values);

    write_json_file(manifest.output_dir / "run_log.json",
                    {{"num_steps", config.schedule.num_steps},
                     {"timesteps", config.schedule.timesteps},
                     {"steps", steps},
                     {"final_latent", result.final_latent.values},
                     {"final_latent_checksum", to_hex(artifacts.final_latent_checksum)},
                     {"restored_checksum", to_hex(artifacts.restored_checksum)},
                     {"retained_tags", artifacts.retained_tags},
                     {"grounded_coverage", artifacts.grounded_coverage}});

    if (settings.export_attention) {
        const fs::path attn_dir = manifest.output_dir / "attn";
        make_output_dir(attn_dir);
        for (const auto& pair : retained) {
            const auto maps = export_attention_maps(result.diagnostics, tags.layout, pair.tag);
            for (const auto& map : maps) {
                ImageGrid img(1, map.resolution.h, map.resolution.w, 1.0);
                img.values = map.values;
                char name[128];
                std::snprintf(name, sizeof(name), "%s_step%zu_layer%zu.pgm",
                              sanitize_filename(pair.tag).c_str(), map.step_index,
                              map.layer_index);
                write_netpbm(attn_dir / name, img);
            }
        }
    }

    if (manifest.reference_image) {
        const ImageGrid reference = read_netpbm(*manifest.reference_image);
        if (!reference.same_shape(restored))
            throw DimensionError("reference image shape does not match the restored output");
        const bool want_psnr =
            std::count(manifest.metric_selection.begin(), manifest.metric_selection.end(),
                       "psnr") > 0;
        const bool want_ssim =
            std::count(manifest.metric_selection.begin(), manifest.metric_selection.end(),
                       "ssim") > 0;

        MetricsReport report;
        report.psnr_color = settings.psnr_color;
        if (want_psnr)
            report.psnr = psnr(metric_view(restored, settings.psnr_color),
                               metric_view(reference, settings.psnr_color), 255.0);
        if (want_ssim) report.ssim = ssim(restored, reference);

        const Resolution img_res = restored.resolution();
        const BinaryGrid union_up =
            resample_mask(masks.base_union, img_res, ResamplePolicy::Nearest);
        const BinaryGrid ungrounded_up = build_ungrounded_mask(union_up).mask;
        report.grounded = region_report(restored, reference, union_up, settings.psnr_color,
                                        want_psnr, want_ssim);
        report.ungrounded = region_report(restored, reference, ungrounded_up,
                                          settings.psnr_color, want_psnr, want_ssim);

        write_json_file(manifest.output_dir / "metrics.json", metrics_to_json(report));
        write_metrics_txt(manifest.output_dir / "metrics.txt", report);
        artifacts.metrics = report;
    }
    return artifacts;
}

void SweepReport::validate() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].threshold < rows[i - 1].threshold)
            throw Error("sweep rows are not sorted by threshold");
        if (rows[i].retained_tags > rows[i - 1].retained_tags)
            throw Error("retained-tag count increased with the threshold");
        if (rows[i].coverage > rows[i - 1].coverage + 1e-12)
            throw Error("grounded coverage increased with the threshold");
    }
}

SweepReport threshold_sweep(const PipelineManifest& manifest,
                            std::vector<double> thresholds) {
    if (thresholds.empty()) throw ConfigError("sweep needs at least one threshold");
    for (double t : thresholds)
        if (t < 0.0 || t > 1.0)
            throw ConfigError("sweep threshold " + std::to_string(t) + " outside [0, 1]");
    std::sort(thresholds.begin(), thresholds.end());

    SweepReport report;
    for (double t : thresholds) {
        PipelineManifest local = manifest;
        local.run.threshold = t;
        local.output_dir = manifest.output_dir / "sweep" / ("threshold_" + format_threshold(t));
        const RunArtifacts artifacts = run_pipeline(local);

        SweepRow row;
        row.threshold = t;
        row.retained_tags = artifacts.retained_tags;
        row.coverage = artifacts.grounded_coverage;
        if (artifacts.metrics) {
            row.psnr = artifacts.metrics->psnr;
            row.ssim = artifacts.metrics->ssim;
        }
        report.rows.push_back(row);
    }
    report.validate();

    make_output_dir(manifest.output_dir);
    json rows = json::array();
    for (const auto& row : report.rows) {
        json entry = {{"threshold", row.threshold},
                      {"retained_tags", row.retained_tags},
                      {"coverage", row.coverage}};
        entry["psnr_db"] =
            row.psnr && !row.psnr->infinite ? json(row.psnr->db) : json(nullptr);
        entry["psnr_infinite"] = row.psnr ? json(row.psnr->infinite) : json(false);
        entry["ssim"] = row.ssim ? json(*row.ssim) : json(nullptr);
        rows.push_back(std::move(entry));
    }
    write_json_file(manifest.output_dir / "sweep_report.json", {{"rows", rows}});

    std::ofstream txt(manifest.output_dir / "sweep_report.txt");
    if (!txt) throw IoError("cannot write sweep_report.txt");
    txt << "threshold  retained  coverage  psnr_db  ssim\n";
    for (const auto& row : report.rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10s %-9zu %-9.4f %-8s %s\n",
                      format_threshold(row.threshold).c_str(), row.retained_tags,
                      row.coverage, row.psnr ? row.psnr->str().c_str() : "n/a",
                      row.ssim ? std::to_string(*row.ssim).c_str() : "n/a");
        txt << line;
    }
    return report;
}

namespace {

struct LoadedRun {
    json config;
    json log;
    BinaryGrid ungrounded;
    ImageGrid restored;
    std::optional<json> metrics;
};

LoadedRun load_run_dir(const fs::path& dir) {
    if (!fs::exists(dir / "config_resolved.json"))
        throw ComparisonError(dir.string() + " is not a pipeline output directory");
    LoadedRun run;
    run.config = parse_json_file(dir / "config_resolved.json");
    run.log = parse_json_file(dir / "run_log.json");
    run.ungrounded = read_mask_image(dir / "ungrounded.pgm");
    run.restored = read_netpbm(dir / "restored.ppm");
    if (fs::exists(dir / "metrics.json"))
        run.metrics = parse_json_file(dir / "metrics.json");
    return run;
}

RegionDelta region_delta(const std::vector<double>& a, const std::vector<double>& b,
                         const BinaryGrid& mask, bool want_ungrounded, std::size_t channels) {
    RegionDelta delta;
    delta.bit_identical = true;
    const std::size_t plane = mask.v.size();
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t p = 0; p < plane; ++p) {
            const bool ungrounded_pixel = mask.v[p] != 0;
            if (ungrounded_pixel != want_ungrounded) continue;
            const double d = std::fabs(a[c * plane + p] - b[c * plane + p]);
            delta.max_abs_eps_delta = std::max(delta.max_abs_eps_delta, d);
            if (d != 0.0) delta.bit_identical = false;
        }
    return delta;
}

} // namespace

CompareReport compare_runs(const fs::path& run_a, const fs::path& run_b,
                           const std::optional<fs::path>& report_path) {
    const LoadedRun a = load_run_dir(run_a);
    const LoadedRun b = load_run_dir(run_b);

    for (const char* field : {"denoiser", "steps", "seed"})
        if (a.config.at(field) != b.config.at(field))
            throw ComparisonError(std::string("runs disagree on '") + field +
                                  "'; not comparable");

    CompareReport report;
    report.restored_identical = a.restored.values == b.restored.values &&
                                a.restored.same_shape(b.restored);
    report.final_latent_identical =
        a.log.at("final_latent_checksum") == b.log.at("final_latent_checksum");
    report.regions_comparable = a.ungrounded == b.ungrounded;

    if (report.regions_comparable) {
        const auto eps_a = a.log.at("steps").at(0).at("eps_blended").get<std::vector<double>>();
        const auto eps_b = b.log.at("steps").at(0).at("eps_blended").get<std::vector<double>>();
        if (eps_a.size() == eps_b.size() && !eps_a.empty()) {
            const std::size_t channels = eps_a.size() / a.ungrounded.v.size();
            report.grounded = region_delta(eps_a, eps_b, a.ungrounded, false, channels);
            report.ungrounded = region_delta(eps_a, eps_b, a.ungrounded, true, channels);
        }
    }

    if (a.metrics && b.metrics) {
        const json& ma = *a.metrics;
        const json& mb = *b.metrics;
        auto psnr_delta = [](const json& pa, const json& pb) -> std::optional<double> {
            if (pa.is_null() || pb.is_null()) return std::nullopt;
            if (pa.at("infinite").get<bool>() || pb.at("infinite").get<bool>())
                return std::nullopt;
            return pb["db"].get<double>() - pa["db"].get<double>();
        };
        auto ssim_delta = [](const json& sa, const json& sb) -> std::optional<double> {
            if (sa.is_null() || sb.is_null()) return std::nullopt;
            return sb.get<double>() - sa.get<double>();
        };
        report.psnr_delta_db = psnr_delta(ma.at("psnr"), mb.at("psnr"));
        report.ssim_delta = ssim_delta(ma.at("ssim"), mb.at("ssim"));
        auto region_deltas = [&](const char* name, std::optional<double>& psnr_out,
                                 std::optional<double>& ssim_out) {
            const json& ra = ma.at("regions").at(name);
            const json& rb = mb.at("regions").at(name);
            if (ra.is_null() || rb.is_null()) return;
            psnr_out = psnr_delta(ra.at("psnr"), rb.at("psnr"));
            ssim_out = ssim_delta(ra.at("ssim"), rb.at("ssim"));
        };
        region_deltas("grounded", report.grounded_psnr_delta_db, report.grounded_ssim_delta);
        region_deltas("ungrounded", report.ungrounded_psnr_delta_db,
                      report.ungrounded_ssim_delta);
    }

    if (report_path) {
        json doc = {{"run_a", run_a.string()},
                    {"run_b", run_b.string()},
                    {"restored_identical", report.restored_identical},
                    {"final_latent_identical", report.final_latent_identical},
                    {"regions_comparable", report.regions_comparable}};
        auto delta_json = [](const std::optional<RegionDelta>& d) -> json {
            if (!d) return nullptr;
            return {{"max_abs_eps_delta", d->max_abs_eps_delta},
                    {"bit_identical", d->bit_identical}};
        };
        doc["step1_grounded"] = delta_json(report.grounded);
        doc["step1_ungrounded"] = delta_json(report.ungrounded);
        auto opt_json = [](const std::optional<double>& v) {
            return v ? json(*v) : json(nullptr);
        };
        doc["psnr_delta_db"] = opt_json(report.psnr_delta_db);
        doc["ssim_delta"] = opt_json(report.ssim_delta);
        doc["grounded_psnr_delta_db"] = opt_json(report.grounded_psnr_delta_db);
        doc["grounded_ssim_delta"] = opt_json(report.grounded_ssim_delta);
        doc["ungrounded_psnr_delta_db"] = opt_json(report.ungrounded_psnr_delta_db);
        doc["ungrounded_ssim_delta"] = opt_json(report.ungrounded_ssim_delta);
        write_json_file(*report_path, doc);
    }
    return report;
}

} // namespace srsr
