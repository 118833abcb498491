// SPDX-License-Identifier: Apache-2.0
#pragma once

// Counter-seeded xoshiro256++ streams. Every (seed, point, sample) triple
// maps to its own stream, so results do not depend on scheduling.

#include "vcwos/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace vcwos {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng() : Rng(0) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            word = splitmix64(sm);
        }
    }

    /// Stream for sample `sample` of point `point` under the global `seed`.
    static Rng for_sample(std::uint64_t seed, std::uint64_t point, std::uint64_t sample) {
        std::uint64_t sm = seed;
        std::uint64_t key = splitmix64(sm);
        sm = key ^ (point * 0xd1b54a32d192ed03ULL);
        key = splitmix64(sm);
        sm = key ^ (sample * 0x8cb92ba72f3d8dd7ULL);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller, one value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Independent child stream; advances this stream by one draw.
    Rng split() {
        std::uint64_t sm = next_u64() ^ 0x6a09e667f3bcc909ULL;
        return Rng(splitmix64(sm));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Uniform direction on the unit sphere S^{Dim-1}.
template <int Dim>
Vec<Dim> sample_unit_direction(Rng& rng) {
    if constexpr (Dim == 2) {
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        return Vec<2>(std::cos(angle), std::sin(angle));
    } else {
        const double z = 1.0 - 2.0 * rng.uniform();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        return Vec<3>(rho * std::cos(angle), rho * std::sin(angle), z);
    }
}

/// Uniform point on the sphere of radius `radius` around `center`.
template <int Dim>
Vec<Dim> sample_sphere_uniform(const Vec<Dim>& center, double radius, Rng& rng) {
    if (!(radius > 0.0)) {
        throw DomainError("sample_sphere_uniform: radius must be positive");
    }
    return center + radius * sample_unit_direction<Dim>(rng);
}

/// Uniform point in the ball of radius `radius` around `center`.
template <int Dim>
Vec<Dim> sample_ball_uniform(const Vec<Dim>& center, double radius, Rng& rng) {
    const double r = radius * std::pow(rng.uniform(), 1.0 / Dim);
    return center + r * sample_unit_direction<Dim>(rng);
}

}  // namespace vcwos
