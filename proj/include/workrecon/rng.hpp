// Copyright 2026 The workrecon authors
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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace workrecon {

// FNV-1a over arbitrary bytes. Used to derive per-stage, per-trial seeds from
// one master seed so that every random stream in a run is reproducible and
// independent streams never share state.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<unsigned char>(value >> (8 * i));
        h *= 0x100000001b3ull;
    }
    return h;
}

// seed(stage, trial) = FNV1a(tag bytes || master little-endian || index little-endian)
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return fnv1a64(index, fnv1a64(master, fnv1a64(tag)));
}

// Gaussian stream on top of mt19937_64. std::normal_distribution is
// implementation-defined, so we Box-Muller by hand: two raw 64-bit draws per
// variate (cos branch only, no cached state). This keeps seeded fixtures
// byte-stable across standard libraries.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        const double u1 = ((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = (engine_() >> 11) * 0x1.0p-53;        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace workrecon
