// Copyright 2026 The QRA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deterministic random streams. Every stochastic quantity in the library is
// drawn from an Rng obtained through derive_stream(), so a run is fully
// determined by the integer keys used to derive its streams.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qra {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_keys(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto k : keys) h = splitmix64(h ^ splitmix64(k));
    return h;
}

inline Rng derive_stream(std::initializer_list<std::uint64_t> keys) {
    return Rng(hash_keys(keys));
}

/// Uniform draw from the open interval (lo, hi).
inline double uniform_open(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    double x = dist(rng);
    while (x <= lo) x = dist(rng);
    return x;
}

/// Stable 64-bit FNV-1a over raw bytes; used for cache keys and fingerprints.
class Fnv1a {
public:
    void update(const void* data, std::size_t n) noexcept {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    template <typename T>
    void update_value(const T& v) noexcept { update(&v, sizeof(T)); }
    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace qra
