// SPDX-License-Identifier: Apache-2.0
#include "srsr/tokenizer.hpp"

#include "srsr/errors.hpp"
#include "srsr/rng.hpp"

#include <cctype>

namespace srsr {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

bool entirely_non_alphanumeric(const std::string& text) {
    for (unsigned char c : text)
        if (is_word_char(c)) return false;
    return !text.empty();
}

} // namespace

std::vector<Token> tokenize_prompt(const std::string& prompt, std::size_t pad_to) {
    std::vector<Token> tokens;
    tokens.push_back({kSosText, 0, true});

    std::size_t i = 0;
    while (i < prompt.size()) {
        const unsigned char c = prompt[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_word_char(c)) {
            while (i < prompt.size() && is_word_char(static_cast<unsigned char>(prompt[i]))) ++i;
        } else {
            while (i < prompt.size() && !is_word_char(static_cast<unsigned char>(prompt[i])) &&
                   !std::isspace(static_cast<unsigned char>(prompt[i])))
                ++i;
        }
        tokens.push_back({prompt.substr(start, i - start), start, false});
    }

    tokens.push_back({kEosText, prompt.size(), true});
    while (tokens.size() < pad_to) tokens.push_back({kPadText, prompt.size(), true});
    return tokens;
}

TokenLayout build_token_layout(std::vector<Token> tokens,
                               const std::map<std::string, TokenSpan>& tag_spans) {
    TokenLayout layout;
    layout.prompt_tokens = std::move(tokens);
    const std::size_t n = layout.prompt_tokens.size();

    for (std::size_t i = 0; i < n; ++i) {
        const Token& tok = layout.prompt_tokens[i];
        if (tok.special || entirely_non_alphanumeric(tok.text))
            layout.global_token_indices.insert(i);
    }

    for (const auto& [tag, span] : tag_spans) {
        if (span.first > span.last)
            throw ConfigError("tag '" + tag + "' has an empty token span");
        if (span.last >= n)
            throw ConfigError("tag '" + tag + "' span ends past the prompt (" +
                              std::to_string(span.last) + " >= " + std::to_string(n) + ")");
        for (std::size_t i = span.first; i <= span.last; ++i)
            if (layout.is_global(i))
                throw ConfigError("tag '" + tag + "' span covers global token " +
                                  std::to_string(i) + " ('" + layout.prompt_tokens[i].text +
                                  "')");
        layout.tag_spans.emplace(tag, span);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (layout.is_global(i)) continue;
        bool in_span = false;
        for (const auto& [tag, span] : layout.tag_spans)
            if (span.contains(i)) {
                in_span = true;
                break;
            }
        if (!in_span) layout.unassigned_indices.insert(i);
    }
    return layout;
}

Matrix token_embeddings(const std::vector<Token>& tokens, std::size_t token_dim,
                        std::uint64_t seed) {
    if (token_dim == 0) throw ConfigError("token_dim must be >= 1");
    Matrix emb(tokens.size(), token_dim);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        Xoshiro256ss rng(derive_seed(seed, "embed/" + tokens[t].text));
        for (std::size_t d = 0; d < token_dim; ++d) emb(t, d) = rng.uniform(-1.0, 1.0);
    }
    return emb;
}

} // namespace srsr
