// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace srsr {

// Deterministic PRNG stack. All streams are xoshiro256** 1.0 instances whose
// state is expanded from a 64-bit seed with splitmix64; sub-streams are
// derived by folding an FNV-1a hash of a textual label into the seed. The
// algorithms are fixed here (not delegated to <random>) so that identical
// seeds produce identical bytes on every platform.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t basis = 0xcbf29ce484222325ULL) {
    return fnv1a64(std::string_view(static_cast<const char*>(data), size), basis);
}

/// Derives an independent stream seed from (base seed, label).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t s = base ^ fnv1a64(label);
    // one splitmix round to decorrelate labels differing in few bits
    return splitmix64_next(s);
}

class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits, arithmetic only.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per pair.
    void normal_pair(double& a, double& b) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        a = r * std::cos(theta);
        b = r * std::sin(theta);
    }

    std::vector<double> normal_vector(std::size_t n) {
        std::vector<double> out(n);
        std::size_t i = 0;
        while (i + 1 < n) {
            normal_pair(out[i], out[i + 1]);
            i += 2;
        }
        if (i < n) {
            double a, discarded;
            normal_pair(a, discarded);
            out[i] = a;
        }
        return out;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// FNV-1a digest over raw little-endian doubles; used for golden checksums.
class Digest {
public:
    void update(const void* data, std::size_t size) { h_ = fnv1a64(data, size, h_); }

    void update(const std::vector<double>& values) {
        update(values.data(), values.size() * sizeof(double));
    }

    void update(double v) { update(&v, sizeof(v)); }
    void update(std::uint64_t v) { update(&v, sizeof(v)); }

    std::uint64_t value() const { return h_; }
    std::string hex() const;

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);

} // namespace srsr
