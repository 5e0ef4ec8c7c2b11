/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cstdint>
#include <random>

namespace illusion::rng {

/// Advances `state` by one splitmix64 step and returns the mixed output
/// (Steele, Lea and Flood's published constants). Used for seed mixing and
/// substream derivation, never for bulk variate generation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of substream `index` under master seed `seed`. Defined as
///   s = splitmix64_advance(seed); s ^= 0x9E3779B97F4A7C15 * (index + 1);
///   return splitmix64(s)
/// so that distinct indices give decorrelated engine seeds and the mapping
/// is reproducible across platforms.
std::uint64_t derive_substream_seed(std::uint64_t seed, std::uint64_t index);

/// Deterministic random source. Every stochastic routine in the library
/// draws through this class, so outputs depend only on (seed, call order).
///
/// The exact algorithms are part of the reproducibility contract:
///  - engine:  std::mt19937_64 seeded with splitmix64(seed); the C++
///             standard fully specifies its output sequence
///  - uniform: (next_u64() >> 11) * 2^-53, values in [0, 1)
///  - normal:  Box-Muller on (u1, u2) = (1 - uniform(), uniform()); the
///             cosine branch is returned first, the sine branch is cached
///  - bernoulli(p): uniform() < p, one uniform consumed per draw
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Rng seeded for substream `index` of `seed`. Substreams let replicates
    /// and stream batches be generated independently and in parallel while
    /// keeping results identical to sequential generation.
    static Rng substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal draw.
    double normal();

    /// Bernoulli draw; pre: p in [0, 1].
    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace illusion::rng
