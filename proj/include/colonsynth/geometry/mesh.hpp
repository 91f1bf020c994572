#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/vec3.hpp"

namespace colonsynth {

enum class MaterialId : std::uint8_t { Wall = 0, Polyp = 1 };

/// Ring bookkeeping for meshes produced by extrude_tube: vertex
/// (ring i, spoke j) lives at index i * radial_steps + j.
struct TubeLayout {
    std::size_t axial_steps = 0;
    std::size_t radial_steps = 0;
    std::vector<double> ring_arclength;  // cm along the centerline
    std::vector<Vec3> ring_center;
    std::vector<Vec3> ring_tangent;
    std::vector<Vec3> ring_normal;    // spoke direction at theta = 0
    std::vector<Vec3> ring_binormal;  // spoke direction at theta = pi/2

    std::size_t vertex_count() const { return axial_steps * radial_steps; }
    std::size_t index(std::size_t ring, std::size_t spoke) const { return ring * radial_steps + spoke; }
};

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<Vec3> normals;
    std::vector<MaterialId> materials;  // per vertex
    std::optional<TubeLayout> tube;     // present while the tube vertices lead the array

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }

    friend bool operator==(const TriMesh& a, const TriMesh& b) {
        return a.vertices == b.vertices && a.triangles == b.triangles && a.normals == b.normals &&
               a.materials == b.materials;
    }
};

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * length(cross(b - a, c - a));
}

inline double surface_area(const TriMesh& mesh) {
    double area = 0.0;
    for (const auto& t : mesh.triangles) {
        area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    }
    return area;
}

/// Area-weighted vertex normals following triangle winding (CCW front).
inline void recompute_normals(TriMesh& mesh) {
    mesh.normals.assign(mesh.vertices.size(), Vec3{});
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        const Vec3 n = cross(b - a, c - a);  // length = 2 * area
        for (auto idx : t) mesh.normals[idx] += n;
    }
    for (auto& n : mesh.normals) n = normalize(n);
}

/// Validates index ranges and attribute array sizes.
inline void validate(const TriMesh& mesh) {
    const auto n = mesh.vertices.size();
    if (mesh.normals.size() != n || mesh.materials.size() != n) {
        throw std::invalid_argument("TriMesh: attribute arrays do not match vertex count");
    }
    for (const auto& t : mesh.triangles) {
        for (auto idx : t) {
            if (idx >= n) throw std::invalid_argument("TriMesh: triangle index out of range");
        }
    }
}

/// Appends `other` to `mesh`; triangle indices are rebased.
inline void append(TriMesh& mesh, const TriMesh& other) {
    const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
    mesh.normals.insert(mesh.normals.end(), other.normals.begin(), other.normals.end());
    mesh.materials.insert(mesh.materials.end(), other.materials.begin(), other.materials.end());
    for (const auto& t : other.triangles) {
        mesh.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
}

/// ASCII PLY with float64 vertex coordinates and per-vertex normals.
inline void export_mesh_ply(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "ply\nformat ascii 1.0\ncomment units cm\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "property double nx\nproperty double ny\nproperty double nz\n";
    out << "property uchar material\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar uint vertex_indices\nend_header\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& p = mesh.vertices[i];
        const Vec3 n = i < mesh.normals.size() ? mesh.normals[i] : Vec3{};
        const int m = i < mesh.materials.size() ? static_cast<int>(mesh.materials[i]) : 0;
        out << p.x << ' ' << p.y << ' ' << p.z << ' ' << n.x << ' ' << n.y << ' ' << n.z << ' '
            << m << '\n';
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace colonsynth
