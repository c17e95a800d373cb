// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/mask.hpp"
#include "srsr/tokenizer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace srsr {

/// Parsed grounding input: the prompt, its token layout, and one
/// tag/span/mask/confidence record per grounded tag.
///
/// On disk this is a JSON document:
///   {
///     "prompt": "a bird on stone",
///     "pad_to": 8,                                // optional
///     "tags": [
///       {"tag": "bird", "token_span": [2, 2],     // inclusive, 0-based,
///        "confidence": 0.92,                      //   index 0 is <sos>
///        "mask_path": "masks/bird.pgm"}           // relative to this file
///     ]
///   }
/// Masks are 8-bit single-channel PGM at the latent base resolution;
/// nonzero pixels count as 1.
struct TagFile {
    std::string prompt;
    std::size_t pad_to = 0;
    TokenLayout layout;
    std::vector<TagMaskPair> pairs;
};

TagFile load_tag_file(const std::filesystem::path& path, Resolution base_resolution);

/// Writes a TagFile back to disk (masks as PGM next to the JSON); used by
/// fixtures and round-trip tests.
void save_tag_file(const std::filesystem::path& path, const std::string& prompt,
                   std::size_t pad_to, const std::vector<TagMaskPair>& pairs);

} // namespace srsr
