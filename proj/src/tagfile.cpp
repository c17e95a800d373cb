// SPDX-License-Identifier: Apache-2.0
#include "srsr/tagfile.hpp"

#include "srsr/errors.hpp"
#include "srsr/image_io.hpp"

#include <json.hpp>

#include <fstream>

namespace srsr {

using nlohmann::json;

namespace {

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

} // namespace

TagFile load_tag_file(const std::filesystem::path& path, Resolution base_resolution) {
    const json doc = parse_json_file(path);
    if (!doc.contains("prompt") || !doc["prompt"].is_string())
        throw ConfigError(path.string() + ": missing string field 'prompt'");

    TagFile out;
    out.prompt = doc["prompt"].get<std::string>();
    out.pad_to = doc.value("pad_to", std::size_t{0});

    const auto dir = path.parent_path();
    std::map<std::string, TokenSpan> spans;
    if (doc.contains("tags")) {
        if (!doc["tags"].is_array())
            throw ConfigError(path.string() + ": 'tags' must be an array");
        for (const auto& rec : doc["tags"]) {
            for (const char* field : {"tag", "token_span", "confidence", "mask_path"})
                if (!rec.contains(field))
                    throw ConfigError(path.string() + ": tag record missing '" +
                                      std::string(field) + "'");
            TagMaskPair pair;
            pair.tag = rec["tag"].get<std::string>();
            const auto& span = rec["token_span"];
            if (!span.is_array() || span.size() != 2)
                throw ConfigError("token_span for '" + pair.tag +
                                  "' must be [first, last] (inclusive)");
            pair.token_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
            pair.confidence = rec["confidence"].get<double>();
            if (pair.confidence < 0.0 || pair.confidence > 1.0)
                throw ConfigError("confidence for '" + pair.tag + "' must lie in [0, 1]");

            const auto mask_path = dir / rec["mask_path"].get<std::string>();
            pair.mask = read_mask_image(mask_path);
            if (pair.mask.resolution() != base_resolution)
                throw ConfigError("mask for '" + pair.tag + "' is " +
                                  std::to_string(pair.mask.h) + "x" +
                                  std::to_string(pair.mask.w) + ", expected the latent base " +
                                  std::to_string(base_resolution.h) + "x" +
                                  std::to_string(base_resolution.w));
            if (spans.count(pair.tag))
                throw ConfigError("duplicate tag '" + pair.tag + "' in " + path.string());
            spans.emplace(pair.tag, pair.token_span);
            out.pairs.push_back(std::move(pair));
        }
    }
    out.layout = build_token_layout(tokenize_prompt(out.prompt, out.pad_to), spans);
    return out;
}

void save_tag_file(const std::filesystem::path& path, const std::string& prompt,
                   std::size_t pad_to, const std::vector<TagMaskPair>& pairs) {
    const auto dir = path.parent_path();
    json doc;
    doc["prompt"] = prompt;
    if (pad_to > 0) doc["pad_to"] = pad_to;
    doc["tags"] = json::array();
    for (const auto& pair : pairs) {
        const std::string mask_name = "mask_" + sanitize_filename(pair.tag) + ".pgm";
        write_mask_image(dir / mask_name, pair.mask);
        doc["tags"].push_back({{"tag", pair.tag},
                               {"token_span", {pair.token_span.first, pair.token_span.last}},
                               {"confidence", pair.confidence},
                               {"mask_path", mask_name}});
    }
    std::ofstream outfile(path);
    if (!outfile) throw IoError("cannot write " + path.string());
    outfile << doc.dump(2) << "\n";
}

} // namespace srsr
