// Copyright 2026 The fcmqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

namespace fcmqem {

// Randomness contract
// -------------------
// Every random stream is a Philox4x32-10 counter-based generator (Salmon et
// al., SC'11) keyed by a 64-bit stream key. Stream keys are derived from the
// master seed and a path of integers (e.g. {stage, circuit, state, rep}) with
// SplitMix64 mixing, so any cell of a run can be regenerated on its own and
// results never depend on execution order or thread count. Uniform doubles
// take the top 53 bits of a 64-bit draw; normals use the Box-Muller cosine
// branch. No library distribution objects are used.

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ull));
    }
    return h;
}

/// FNV-1a, used to turn names into stable stream-path components.
inline constexpr std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

class Philox4x32 {
   public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; round++) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto lo0 = static_cast<std::uint32_t>(p0);
            auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Sequential view over one Philox stream. Satisfies
/// std::uniform_random_bit_generator.
class Rng {
   public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t stream_key)
        : key_{static_cast<std::uint32_t>(stream_key), static_cast<std::uint32_t>(stream_key >> 32)} {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        if (used_ == 2) {
            Philox4x32::Block ctr{
                static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
            block_ = Philox4x32::generate(ctr, key_);
            counter_++;
            used_ = 0;
        }
        std::size_t k = 2 * used_++;
        return (std::uint64_t{block_[k + 1]} << 32) | block_[k];
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    Philox4x32::Key key_;
    Philox4x32::Block block_{};
    std::uint64_t counter_ = 0;
    std::size_t used_ = 2;
};

}  // namespace fcmqem
