// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared end-to-end fixture: writes a complete pipeline workspace (input and
// reference images, tag file with masks, manifest) into a directory. All
// content is deterministic.

#include "srsr/image_io.hpp"
#include "srsr/rng.hpp"
#include "srsr/tagfile.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace fixture {

namespace fs = std::filesystem;
using nlohmann::json;

inline srsr::ImageGrid make_test_image(std::uint64_t seed, std::size_t h = 32,
                                       std::size_t w = 32) {
    srsr::ImageGrid img(3, h, w, 255.0);
    srsr::Xoshiro256ss rng(seed);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) {
                const double grad = 255.0 * (double(x + y + 8 * c) / double(h + w + 24));
                const double noise = rng.uniform(-24.0, 24.0);
                img.at(c, y, x) = std::min(255.0, std::max(0.0, std::floor(grad + noise)));
            }
    return img;
}

// three tags: bird (conf 0.9, top half), stone (conf 0.6, bottom patch),
// sunlight (conf 0.2, one row) on an 8x8 base grid
inline std::vector<srsr::TagMaskPair> make_tag_pairs() {
    srsr::BinaryGrid bird(8, 8, 0), stone(8, 8, 0), sunlight(8, 8, 0);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 8; ++x) bird.set(y, x, 1);
    for (std::size_t y = 5; y < 8; ++y)
        for (std::size_t x = 2; x < 7; ++x) stone.set(y, x, 1);
    for (std::size_t x = 0; x < 8; ++x) sunlight.set(4, x, 1);
    return {{"bird", {2, 2}, bird, 0.9},
            {"stone", {4, 4}, stone, 0.6},
            {"sunlight", {7, 7}, sunlight, 0.2}};
}

inline constexpr const char* kPrompt = "a bird on stone , in sunlight";

/// Writes the workspace and returns the manifest path. `run_patch` is merged
/// over the default "run" block; `top_patch` over the document root.
inline fs::path write_workspace(const fs::path& root, json run_patch = json::object(),
                                json top_patch = json::object()) {
    fs::create_directories(root);
    srsr::write_netpbm(root / "input.ppm", make_test_image(101));
    srsr::write_netpbm(root / "ref.ppm", make_test_image(202));
    srsr::save_tag_file(root / "tags.json", kPrompt, 12, make_tag_pairs());

    json run = {{"steps", 8},
                {"guidance_scale", 3.0},
                {"srca", true},
                {"stcfg", true},
                {"renorm", "per_pixel"},
                {"threshold", 0.25},
                {"resample", "any_coverage"},
                {"seed", 42},
                {"denoiser",
                 {{"latent_channels", 4},
                  {"base_resolution", {8, 8}},
                  {"token_dim", 16},
                  {"decode_upscale", 4},
                  {"weight_seed", 7},
                  {"layers",
                   {{{"resolution", {8, 8}}, {"heads", 2}, {"head_dim", 8}},
                    {{"resolution", {4, 4}}, {"heads", 2}, {"head_dim", 8}},
                    {{"resolution", {8, 8}}, {"heads", 2}, {"head_dim", 8}}}}}}};
    run.update(run_patch);

    json doc = {{"input_image", "input.ppm"},
                {"tag_file", "tags.json"},
                {"reference_image", "ref.ppm"},
                {"output_dir", "out"},
                {"run", run}};
    doc.update(top_patch);

    const fs::path manifest = root / "manifest.json";
    std::ofstream out(manifest);
    out << doc.dump(2) << "\n";
    return manifest;
}

inline std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace fixture
