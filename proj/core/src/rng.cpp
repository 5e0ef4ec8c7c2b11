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
#include <illusion/rng.hpp>

#include <illusion/errors.hpp>

#include <cmath>
#include <numbers>

namespace illusion::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ull * (index + 1);
    return splitmix64(s);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64(s));
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_substream_seed(seed, index));
}

std::uint64_t Rng::next_u64() {
    return engine_();
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

bool Rng::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw PreconditionError("bernoulli probability must lie in [0, 1]");
    }
    return uniform() < p;
}

} // namespace illusion::rng
