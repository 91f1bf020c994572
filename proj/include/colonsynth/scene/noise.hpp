#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/core/vec3.hpp"

namespace colonsynth {

/// Improved Perlin gradient noise with a seeded permutation table.
/// Zero at every integer lattice point; output clamped to [-1, 1].
class PerlinNoise {
public:
    explicit PerlinNoise(std::uint64_t seed = 0) {
        std::array<std::uint8_t, 256> p{};
        for (int i = 0; i < 256; ++i) p[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
        Rng rng(derive_seed(seed, 0x9E71));
        for (int i = 255; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
            std::swap(p[static_cast<std::size_t>(i)], p[j]);
        }
        for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255];
    }

    double operator()(const Vec3& q) const {
        const double fx = std::floor(q.x), fy = std::floor(q.y), fz = std::floor(q.z);
        const int X = static_cast<int>(fx) & 255, Y = static_cast<int>(fy) & 255, Z = static_cast<int>(fz) & 255;
        const double x = q.x - fx, y = q.y - fy, z = q.z - fz;
        const double u = fade(x), v = fade(y), w = fade(z);
        const int A = perm(X) + Y, AA = perm(A) + Z, AB = perm(A + 1) + Z;
        const int B = perm(X + 1) + Y, BA = perm(B) + Z, BB = perm(B + 1) + Z;
        const double r =
            lerp(w,
                 lerp(v, lerp(u, grad(perm(AA), x, y, z), grad(perm(BA), x - 1, y, z)),
                      lerp(u, grad(perm(AB), x, y - 1, z), grad(perm(BB), x - 1, y - 1, z))),
                 lerp(v, lerp(u, grad(perm(AA + 1), x, y, z - 1), grad(perm(BA + 1), x - 1, y, z - 1)),
                      lerp(u, grad(perm(AB + 1), x, y - 1, z - 1), grad(perm(BB + 1), x - 1, y - 1, z - 1))));
        return std::clamp(r, -1.0, 1.0);
    }

    /// Normalized fractal sum: octave k has frequency 2^k and weight 2^-k.
    double fbm(const Vec3& q, int octaves) const {
        double sum = 0.0, norm = 0.0, amp = 1.0, freq = 1.0;
        for (int k = 0; k < octaves; ++k) {
            sum += amp * (*this)(q * freq);
            norm += amp;
            amp *= 0.5;
            freq *= 2.0;
        }
        return norm > 0.0 ? sum / norm : 0.0;
    }

private:
    int perm(int i) const { return perm_[static_cast<std::size_t>(i)]; }
    static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
    static double lerp(double t, double a, double b) { return a + t * (b - a); }
    static double grad(int hash, double x, double y, double z) {
        const int h = hash & 15;
        const double u = h < 8 ? x : y;
        const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
        return ((h & 1) == 0 ? u : -u) + ((h & 2) == 0 ? v : -v);
    }

    std::array<std::uint8_t, 512> perm_{};
};

namespace detail {
inline std::uint64_t hash_cell(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed) {
    std::uint64_t h = seed;
    h = mix_seed(h ^ static_cast<std::uint64_t>(x));
    h = mix_seed(h ^ static_cast<std::uint64_t>(y));
    h = mix_seed(h ^ static_cast<std::uint64_t>(z));
    return h;
}
inline double hash_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Trilinearly interpolated lattice value noise in [0, 1].
inline double value_noise(const Vec3& q, std::uint64_t seed) {
    const double fx = std::floor(q.x), fy = std::floor(q.y), fz = std::floor(q.z);
    const auto X = static_cast<std::int64_t>(fx), Y = static_cast<std::int64_t>(fy), Z = static_cast<std::int64_t>(fz);
    auto s = [](double t) { return t * t * (3.0 - 2.0 * t); };
    const double u = s(q.x - fx), v = s(q.y - fy), w = s(q.z - fz);
    auto c = [&](int dx, int dy, int dz) { return detail::hash_unit(detail::hash_cell(X + dx, Y + dy, Z + dz, seed)); };
    const double x00 = c(0, 0, 0) + u * (c(1, 0, 0) - c(0, 0, 0));
    const double x10 = c(0, 1, 0) + u * (c(1, 1, 0) - c(0, 1, 0));
    const double x01 = c(0, 0, 1) + u * (c(1, 0, 1) - c(0, 0, 1));
    const double x11 = c(0, 1, 1) + u * (c(1, 1, 1) - c(0, 1, 1));
    const double y0 = x00 + v * (x10 - x00), y1 = x01 + v * (x11 - x01);
    return y0 + w * (y1 - y0);
}

/// Distance to the nearest and second-nearest feature point of a jittered
/// cubic lattice (Worley/Voronoi cells).
struct VoronoiSample {
    double f1;
    double f2;
};

inline VoronoiSample voronoi(const Vec3& q, std::uint64_t seed) {
    const double fx = std::floor(q.x), fy = std::floor(q.y), fz = std::floor(q.z);
    const auto X = static_cast<std::int64_t>(fx), Y = static_cast<std::int64_t>(fy), Z = static_cast<std::int64_t>(fz);
    double f1 = std::numeric_limits<double>::max(), f2 = f1;
    for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const std::uint64_t h = detail::hash_cell(X + dx, Y + dy, Z + dz, seed);
                const Vec3 feature{fx + dx + detail::hash_unit(h), fy + dy + detail::hash_unit(mix_seed(h)),
                                   fz + dz + detail::hash_unit(mix_seed(h + 1))};
                const double d = distance(feature, q);
                if (d < f1) { f2 = f1; f1 = d; } else if (d < f2) { f2 = d; }
            }
        }
    }
    return {f1, f2};
}

}  // namespace colonsynth
