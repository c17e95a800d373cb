// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "srsr/errors.hpp"
#include "srsr/mask.hpp"
#include "srsr/rng.hpp"
#include "srsr/tokenizer.hpp"

#include <algorithm>

using namespace srsr;

namespace {

BinaryGrid random_grid(Xoshiro256ss& rng, std::size_t h, std::size_t w, double density = 0.5) {
    BinaryGrid g(h, w);
    for (auto& b : g.v) b = rng.uniform() < density ? 1 : 0;
    return g;
}

TagMaskPair make_pair(std::string tag, TokenSpan span, BinaryGrid mask, double conf) {
    return TagMaskPair{std::move(tag), span, std::move(mask), conf};
}

TokenLayout demo_layout() {
    // "a bird on stone" -> <sos> a bird on stone <eos>
    auto tokens = tokenize_prompt("a bird on stone");
    return build_token_layout(tokens, {{"bird", {2, 2}}, {"stone", {4, 4}}});
}

} // namespace

TEST_CASE("tokenizer splits words and punctuation runs") {
    auto tokens = tokenize_prompt("a bird, on stone!?");
    REQUIRE(tokens.size() == 8);
    CHECK(tokens[0].text == kSosText);
    CHECK(tokens[1].text == "a");
    CHECK(tokens[2].text == "bird");
    CHECK(tokens[3].text == ",");
    CHECK(tokens[4].text == "on");
    CHECK(tokens[5].text == "stone");
    CHECK(tokens[6].text == "!?");
    CHECK(tokens[7].text == kEosText);

    auto padded = tokenize_prompt("hi", 6);
    REQUIRE(padded.size() == 6);
    CHECK(padded[3].text == kPadText);
    CHECK(padded[5].text == kPadText);
}

TEST_CASE("layout classifies specials and punctuation as global") {
    auto tokens = tokenize_prompt("a bird , on stone", 8);
    auto layout = build_token_layout(tokens, {{"bird", {2, 2}}, {"stone", {5, 5}}});
    // <sos>=0, a=1, bird=2, ","=3, on=4, stone=5, <eos>=6, <pad>=7
    CHECK(layout.is_global(0));
    CHECK(layout.is_global(3));
    CHECK(layout.is_global(6));
    CHECK(layout.is_global(7));
    CHECK_FALSE(layout.is_global(2));
    CHECK(layout.unassigned_indices == std::set<std::size_t>{1, 4});

    // span over a global token or out of range is a configuration error
    CHECK_THROWS_AS(build_token_layout(tokens, {{"x", {3, 3}}}), ConfigError);
    CHECK_THROWS_AS(build_token_layout(tokens, {{"x", {2, 9}}}), ConfigError);
    CHECK_THROWS_AS(build_token_layout(tokens, {{"x", {4, 2}}}), ConfigError);
}

TEST_CASE("embeddings are deterministic and text-keyed") {
    auto tokens = tokenize_prompt("bird bird stone");
    auto a = token_embeddings(tokens, 8, 123);
    auto b = token_embeddings(tokens, 8, 123);
    CHECK(a.values() == b.values());
    // duplicate words share a row
    for (std::size_t d = 0; d < 8; ++d) CHECK(a(1, d) == a(2, d));
    auto c = token_embeddings(tokens, 8, 124);
    CHECK(a.values() != c.values());
}

TEST_CASE("confidence filter keeps >= threshold in order") {
    BinaryGrid m(2, 2, 1);
    std::vector<TagMaskPair> pairs = {
        make_pair("a", {1, 1}, m, 0.9),
        make_pair("b", {2, 2}, m, 0.24),
        make_pair("c", {3, 3}, m, 0.25),
    };
    auto all = filter_by_confidence(pairs, 0.0);
    CHECK(all.size() == 3);

    auto kept = filter_by_confidence(pairs, 0.25);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].tag == "a");
    CHECK(kept[1].tag == "c");

    std::size_t prev = pairs.size();
    for (double t = 0.15; t <= 0.551; t += 0.10) {
        auto now = filter_by_confidence(pairs, t).size();
        CHECK(now <= prev);
        prev = now;
    }
    CHECK_THROWS_AS(filter_by_confidence(pairs, 1.5), ConfigError);
}

TEST_CASE("union of grounded masks is the pixelwise OR") {
    CHECK(union_grounded({}, {3, 3}).count_ones() == 0);

    Xoshiro256ss rng(3);
    BinaryGrid a = random_grid(rng, 4, 5);
    auto single = union_grounded({make_pair("a", {1, 1}, a, 1.0)}, {4, 5});
    CHECK(single == a);

    BinaryGrid b = random_grid(rng, 4, 5);
    auto both = union_grounded({make_pair("a", {1, 1}, a, 1.0), make_pair("b", {2, 2}, b, 1.0)},
                               {4, 5});
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 5; ++c)
            CHECK(both.at(r, c) == ((a.at(r, c) || b.at(r, c)) ? 1 : 0));

    BinaryGrid wrong(3, 3, 1);
    CHECK_THROWS_AS(union_grounded({make_pair("w", {1, 1}, wrong, 1.0)}, {4, 5}),
                    DimensionError);
}

TEST_CASE("ungrounded mask is the exact complement") {
    BinaryGrid zeros(3, 4, 0);
    auto all_unc = build_ungrounded_mask(zeros);
    CHECK(all_unc.mask.count_ones() == 12);

    BinaryGrid ones(3, 4, 1);
    CHECK(build_ungrounded_mask(ones).mask.count_ones() == 0);

    BinaryGrid checker(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) checker.set(r, c, (r + c) % 2);
    auto inv = build_ungrounded_mask(checker);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) CHECK(inv.mask.at(r, c) == 1 - checker.at(r, c));

    // partition: complement OR union covers everything, AND nothing
    Xoshiro256ss rng(8);
    BinaryGrid g = random_grid(rng, 6, 6);
    auto comp = build_ungrounded_mask(g);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        CHECK((g.v[i] | comp.mask.v[i]) == 1);
        CHECK((g.v[i] & comp.mask.v[i]) == 0);
    }
}

TEST_CASE("identity resample returns the input under every policy") {
    Xoshiro256ss rng(21);
    BinaryGrid g = random_grid(rng, 5, 7);
    for (auto policy :
         {ResamplePolicy::AnyCoverage, ResamplePolicy::Majority, ResamplePolicy::Nearest})
        CHECK(resample_mask(g, {5, 7}, policy) == g);
}

TEST_CASE("any-coverage keeps a lone pixel through downsampling") {
    BinaryGrid g(4, 4, 0);
    g.set(2, 1, 1); // block (1, 0) of the 2x2 output
    auto small = resample_mask(g, {2, 2}, ResamplePolicy::AnyCoverage);
    CHECK(small.count_ones() == 1);
    CHECK(small.at(1, 0) == 1);
}

TEST_CASE("block and nearest resampling match the per-block oracle") {
    Xoshiro256ss rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        BinaryGrid g = random_grid(rng, 8, 8);
        auto any = resample_mask(g, {4, 4}, ResamplePolicy::AnyCoverage);
        auto maj = resample_mask(g, {4, 4}, ResamplePolicy::Majority);
        auto near = resample_mask(g, {4, 4}, ResamplePolicy::Nearest);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(any.at(r, c) == oracle::block_any(g.v, 8, 2 * r, 2 * c, 2, 2));
                CHECK(maj.at(r, c) == oracle::block_majority(g.v, 8, 2 * r, 2 * c, 2, 2));
                // centre of a 2x2 block rounds to its bottom-right cell
                CHECK(near.at(r, c) == g.at(2 * r + 1, 2 * c + 1));
            }
    }
}

TEST_CASE("block policies reject non-divisible targets, nearest accepts them") {
    BinaryGrid g(8, 8, 1);
    CHECK_THROWS_AS(resample_mask(g, {3, 3}, ResamplePolicy::AnyCoverage), ResampleError);
    CHECK_THROWS_AS(resample_mask(g, {16, 16}, ResamplePolicy::Majority), ResampleError);
    CHECK(resample_mask(g, {3, 3}, ResamplePolicy::Nearest).count_ones() == 9);
    CHECK(resample_mask(g, {16, 16}, ResamplePolicy::Nearest).count_ones() == 256);
}

TEST_CASE("token-pixel mask with no retained pairs is global-only") {
    auto layout = demo_layout();
    auto mask = build_token_pixel_mask({}, layout, {2, 2});
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t j = 0; j < layout.num_tokens(); ++j)
            CHECK(mask.at(p, j) == (layout.is_global(j) ? 1 : 0));
}

TEST_CASE("full-coverage tag opens its whole span") {
    auto layout = demo_layout();
    BinaryGrid full(2, 2, 1);
    auto mask =
        build_token_pixel_mask({make_pair("bird", {2, 2}, full, 0.9)}, layout, {2, 2});
    for (std::size_t p = 0; p < 4; ++p) CHECK(mask.at(p, 2) == 1);
}

TEST_CASE("two disjoint tags match the double-loop oracle") {
    auto layout = demo_layout(); // 6 tokens: <sos> a bird on stone <eos>
    BinaryGrid top(2, 2, 0), bottom(2, 2, 0);
    top.set(0, 0, 1);
    top.set(0, 1, 1);
    bottom.set(1, 0, 1);
    bottom.set(1, 1, 1);
    std::vector<TagMaskPair> pairs = {make_pair("bird", {2, 2}, top, 0.9),
                                      make_pair("stone", {4, 4}, bottom, 0.8)};
    auto mask = build_token_pixel_mask(pairs, layout, {2, 2});

    for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t j = 0; j < 6; ++j) {
            std::uint8_t want = layout.is_global(j) ? 1 : 0;
            for (const auto& pr : pairs)
                if (pr.token_span.contains(j) && pr.mask.v[p]) want = 1;
            CHECK(mask.at(p, j) == want);
        }
    }
    // unassigned word "a" and "on" are masked everywhere
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(mask.at(p, 1) == 0);
        CHECK(mask.at(p, 3) == 0);
    }
}

TEST_CASE("layout and pair inconsistencies are configuration errors") {
    auto layout = demo_layout();
    BinaryGrid full(2, 2, 1);
    CHECK_THROWS_AS(
        build_token_pixel_mask({make_pair("lizard", {2, 2}, full, 0.9)}, layout, {2, 2}),
        ConfigError);
    CHECK_THROWS_AS(
        build_token_pixel_mask({make_pair("bird", {4, 4}, full, 0.9)}, layout, {2, 2}),
        ConfigError);
}

TEST_CASE("overlapping tags both stay visible on shared pixels") {
    auto layout = demo_layout();
    BinaryGrid a(2, 2, 0), b(2, 2, 0);
    a.set(0, 0, 1);
    a.set(0, 1, 1);
    b.set(0, 1, 1);
    b.set(1, 1, 1);
    auto mask = build_token_pixel_mask(
        {make_pair("bird", {2, 2}, a, 0.9), make_pair("stone", {4, 4}, b, 0.9)}, layout,
        {2, 2});
    // pixel (0,1) = index 1 lies in both masks
    CHECK(mask.at(1, 2) == 1);
    CHECK(mask.at(1, 4) == 1);
}

TEST_CASE("every row of a token-pixel mask has coverage") {
    Xoshiro256ss rng(15);
    auto layout = demo_layout();
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TagMaskPair> pairs = {
            make_pair("bird", {2, 2}, random_grid(rng, 4, 4, 0.3), 0.9),
            make_pair("stone", {4, 4}, random_grid(rng, 4, 4, 0.3), 0.8)};
        auto mask = build_token_pixel_mask(pairs, layout, {4, 4});
        for (std::size_t p = 0; p < mask.num_pixels(); ++p) {
            bool any = false;
            for (std::size_t j = 0; j < mask.num_tokens(); ++j) any = any || mask.at(p, j);
            CHECK(any);
        }
    }
}

TEST_CASE("mask products recompute the complement at every resolution") {
    Xoshiro256ss rng(31);
    auto layout = demo_layout();
    const std::vector<Resolution> resolutions = {{8, 8}, {4, 4}, {2, 2}};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<TagMaskPair> pairs = {
            make_pair("bird", {2, 2}, random_grid(rng, 8, 8, 0.25), 0.9),
            make_pair("stone", {4, 4}, random_grid(rng, 8, 8, 0.25), 0.8)};
        auto products = build_mask_products(pairs, layout, resolutions, {8, 8},
                                            ResamplePolicy::AnyCoverage);
        for (const auto& res : resolutions) {
            BinaryGrid expected_union(res.h, res.w);
            for (const auto& pr : pairs) {
                auto local = resample_mask(pr.mask, res, ResamplePolicy::AnyCoverage);
                for (std::size_t i = 0; i < local.v.size(); ++i)
                    expected_union.v[i] |= local.v[i];
            }
            const auto& ung = products.ungrounded.at(res);
            for (std::size_t i = 0; i < expected_union.v.size(); ++i)
                CHECK(ung.mask.v[i] == (expected_union.v[i] ? 0 : 1));
        }
    }
}

TEST_CASE("mask assembly is bit-deterministic") {
    Xoshiro256ss rng(55);
    auto layout = demo_layout();
    std::vector<TagMaskPair> pairs = {
        make_pair("bird", {2, 2}, random_grid(rng, 8, 8, 0.4), 0.9),
        make_pair("stone", {4, 4}, random_grid(rng, 8, 8, 0.4), 0.8)};
    auto a = build_mask_products(pairs, layout, {{8, 8}, {4, 4}}, {8, 8},
                                 ResamplePolicy::Majority);
    auto b = build_mask_products(pairs, layout, {{8, 8}, {4, 4}}, {8, 8},
                                 ResamplePolicy::Majority);
    CHECK(a.base_union == b.base_union);
    for (const auto& [res, mask] : a.attention_masks)
        CHECK(mask.entries() == b.attention_masks.at(res).entries());
    for (const auto& [res, ung] : a.ungrounded) CHECK(ung.mask == b.ungrounded.at(res).mask);
}

TEST_CASE("threshold sweep shrinks both retained count and union coverage") {
    Xoshiro256ss rng(70);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<TagMaskPair> pairs;
        const std::size_t n = 2 + rng.next() % 4;
        for (std::size_t i = 0; i < n; ++i)
            pairs.push_back(make_pair("t" + std::to_string(i),
                                      {i + 1, i + 1}, random_grid(rng, 8, 8, 0.3),
                                      rng.uniform()));
        std::size_t prev_count = pairs.size() + 1;
        double prev_cov = 2.0;
        for (double t : {0.15, 0.25, 0.35, 0.45, 0.55}) {
            auto kept = filter_by_confidence(pairs, t);
            double cov = union_grounded(kept, {8, 8}).coverage();
            CHECK(kept.size() <= prev_count);
            CHECK(cov <= prev_cov);
            prev_count = kept.size();
            prev_cov = cov;
        }
    }
}
