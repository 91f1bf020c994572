#pragma once

#include <cstdint>
#include <stdexcept>

#include "colonsynth/core/parallel.hpp"
#include "colonsynth/geometry/mesh.hpp"
#include "colonsynth/scene/noise.hpp"

namespace colonsynth {

struct NoiseParams {
    double amplitude = 0.15;  // cm
    double frequency = 0.8;   // 1/cm
    int octaves = 3;
    std::uint64_t seed = 0;

    void validate() const {
        if (amplitude < 0.0) throw std::invalid_argument("NoiseParams: amplitude must be >= 0");
        if (octaves < 1) throw std::invalid_argument("NoiseParams: octaves must be >= 1");
        if (!(frequency > 0.0)) throw std::invalid_argument("NoiseParams: frequency must be positive");
    }
};

/// Moves each vertex along its normal by amplitude * fbm(p * frequency), with
/// the fractal Perlin value in [-1, 1], then recomputes normals. Keeps the
/// tube layout, so |displacement| <= amplitude holds per vertex.
inline TriMesh displace_surface(const TriMesh& mesh, const NoiseParams& params) {
    params.validate();
    if (mesh.normals.size() != mesh.vertices.size()) throw std::invalid_argument("displace_surface: mesh has no normals");
    if (params.amplitude == 0.0) return mesh;
    const PerlinNoise noise(params.seed);
    TriMesh out = mesh;
    parallel_for(mesh.vertices.size(), [&](std::size_t i) {
        const double h = noise.fbm(mesh.vertices[i] * params.frequency, params.octaves);
        out.vertices[i] = mesh.vertices[i] + mesh.normals[i] * (params.amplitude * h);
    });
    recompute_normals(out);
    return out;
}

}  // namespace colonsynth
