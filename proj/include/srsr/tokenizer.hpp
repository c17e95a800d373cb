// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "srsr/tensor.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace srsr {

/// Inclusive token index range [first, last].
struct TokenSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    bool contains(std::size_t idx) const { return idx >= first && idx <= last; }
    std::size_t size() const { return last - first + 1; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Token {
    std::string text;
    std::size_t source_offset = 0; // byte offset in the prompt; 0 for specials
    bool special = false;          // <sos>, <eos>, <pad>
};

inline constexpr const char* kSosText = "<sos>";
inline constexpr const char* kEosText = "<eos>";
inline constexpr const char* kPadText = "<pad>";

/// Splits a prompt into alphanumeric word tokens and punctuation-run tokens,
/// wraps it in <sos>/<eos>, and optionally pads with <pad> up to pad_to.
std::vector<Token> tokenize_prompt(const std::string& prompt, std::size_t pad_to = 0);

/// Token sequence plus the classification every downstream consumer needs:
/// which indices are global (specials and punctuation), which belong to a
/// tag span, and which are unassigned.
struct TokenLayout {
    std::vector<Token> prompt_tokens;
    std::set<std::size_t> global_token_indices;
    std::map<std::string, TokenSpan> tag_spans;
    std::set<std::size_t> unassigned_indices;

    std::size_t num_tokens() const { return prompt_tokens.size(); }
    bool is_global(std::size_t idx) const { return global_token_indices.count(idx) != 0; }
};

/// Builds the layout from a tokenized prompt and declared tag spans.
/// Throws ConfigError when a span is empty, out of range, or collides with a
/// global token.
TokenLayout build_token_layout(std::vector<Token> tokens,
                               const std::map<std::string, TokenSpan>& tag_spans);

/// Deterministic toy embeddings: each token's row depends only on
/// (seed, token text), so equal words share an embedding.
Matrix token_embeddings(const std::vector<Token>& tokens, std::size_t token_dim,
                        std::uint64_t seed);

} // namespace srsr
