#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/image.hpp"
#include "colonsynth/core/vec3.hpp"
#include "colonsynth/render/renderer.hpp"
#include "colonsynth/render/shading.hpp"
#include "colonsynth/scene/camera.hpp"

namespace colonsynth {

/// Camera-space points (x right, y down, z forward), cm.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Rgb8> colors;  // empty or one per point
    std::string frame_id;

    std::size_t size() const { return points.size(); }
    bool has_colors() const { return !colors.empty(); }
};

/// (x, y, z) = d * K^-1 (u, v, 1) with centered pixel coordinates, i.e.
/// x = d u / f, y = d v / f, z = d. Pixels at the miss value (>= max_depth)
/// and non-positive depths are dropped.
inline PointCloud backproject(const DepthMap& depth, const Intrinsics& k, const RgbFrame* rgb = nullptr,
                              double max_depth = kMaxDepthCm) {
    if (depth.width() != k.width || depth.height() != k.height) {
        throw std::invalid_argument("backproject: depth is " + std::to_string(depth.width()) + "x" +
                                    std::to_string(depth.height()) + " but intrinsics are " + std::to_string(k.width) +
                                    "x" + std::to_string(k.height));
    }
    if (!(k.focal_px > 0.0)) throw std::invalid_argument("backproject: focal length must be positive");
    if (rgb) require_same_shape(depth, *rgb, "backproject");
    PointCloud cloud;
    for (std::size_t row = 0; row < depth.height(); ++row) {
        for (std::size_t col = 0; col < depth.width(); ++col) {
            const double d = depth(col, row);
            if (!(d > 0.0) || d >= max_depth) continue;
            const double u = k.u(col) - k.cx, v = k.v(row) - k.cy;
            cloud.points.push_back({d * u / k.focal_px, d * v / k.focal_px, d});
            if (rgb) cloud.colors.push_back((*rgb)(col, row));
        }
    }
    return cloud;
}

/// Camera-space point expressed in world coordinates for a pose.
inline Vec3 camera_to_world(const CameraPose& pose, const Vec3& c) {
    return pose.position + pose.right() * c.x + pose.down() * c.y + pose.optical_axis * c.z;
}

/// Small pyramid marking the camera: apex at the origin, base corners on the
/// image frustum at z = size.
inline std::vector<Vec3> camera_pyramid(const Intrinsics& k, double size = 0.5) {
    const double hx = size * 0.5 * static_cast<double>(k.width) / k.focal_px;
    const double hy = size * 0.5 * static_cast<double>(k.height) / k.focal_px;
    return {{0, 0, 0}, {-hx, -hy, size}, {hx, -hy, size}, {hx, hy, size}, {-hx, hy, size}};
}

namespace detail {
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
}
}  // namespace detail

/// ASCII PLY point cloud. Vertex properties: double x y z, optional uchar
/// red green blue, and uchar camera (1 for the pyramid marker vertices).
inline void export_ply(const PointCloud& cloud, const std::string& path, const std::optional<Intrinsics>& camera = {}) {
    if (cloud.points.empty() && !camera) throw std::invalid_argument("export_ply: empty point cloud");
    if (cloud.has_colors() && cloud.colors.size() != cloud.points.size()) {
        throw std::invalid_argument("export_ply: colour count does not match point count");
    }
    const std::vector<Vec3> marker = camera ? camera_pyramid(*camera) : std::vector<Vec3>{};
    std::ostringstream out;
    out << "ply\nformat ascii 1.0\n";
    out << "comment units cm; camera frame x right, y down, z forward\n";
    if (!cloud.frame_id.empty()) out << "comment frame " << cloud.frame_id << "\n";
    out << "element vertex " << cloud.points.size() + marker.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_colors()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "property uchar camera\nend_header\n";
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Vec3& p = cloud.points[i];
        out << detail::fmt_double(p.x) << ' ' << detail::fmt_double(p.y) << ' ' << detail::fmt_double(p.z);
        if (cloud.has_colors()) {
            out << ' ' << int(cloud.colors[i][0]) << ' ' << int(cloud.colors[i][1]) << ' ' << int(cloud.colors[i][2]);
        }
        out << " 0\n";
    }
    for (const Vec3& p : marker) {
        out << detail::fmt_double(p.x) << ' ' << detail::fmt_double(p.y) << ' ' << detail::fmt_double(p.z);
        if (cloud.has_colors()) out << " 255 255 0";
        out << " 1\n";
    }
    auto f = detail::open_for_write(path);
    f << out.str();
    if (!f) throw std::runtime_error("write failed for " + path);
}

/// 2.5d height field: one vertex (u, v, depth) per pixel in centered pixel
/// coordinates, two triangles per pixel quad.
inline void export_surface(const DepthMap& depth, const std::string& path) {
    if (depth.width() < 2 || depth.height() < 2) throw std::invalid_argument("export_surface: need at least 2x2 pixels");
    const std::size_t w = depth.width(), h = depth.height();
    std::ostringstream out;
    out << "ply\nformat ascii 1.0\n";
    out << "comment 2.5d depth surface: x = u (px), y = v (px), z = depth (cm)\n";
    out << "element vertex " << w * h << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << 2 * (w - 1) * (h - 1) << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t row = 0; row < h; ++row) {
        for (std::size_t col = 0; col < w; ++col) {
            out << detail::fmt_double(static_cast<double>(col) - static_cast<double>(w) / 2.0) << ' '
                << detail::fmt_double(static_cast<double>(row) - static_cast<double>(h) / 2.0) << ' '
                << detail::fmt_double(depth(col, row)) << '\n';
        }
    }
    for (std::size_t row = 0; row + 1 < h; ++row) {
        for (std::size_t col = 0; col + 1 < w; ++col) {
            const std::size_t a = row * w + col, b = a + 1, c = a + w, d = c + 1;
            out << "3 " << a << ' ' << c << ' ' << b << '\n';
            out << "3 " << b << ' ' << c << ' ' << d << '\n';
        }
    }
    auto f = detail::open_for_write(path);
    f << out.str();
    if (!f) throw std::runtime_error("write failed for " + path);
}

/// Minimal ASCII PLY reader for the files written above.
struct PlyData {
    std::vector<std::string> vertex_properties;
    std::vector<std::vector<double>> vertices;  // one row of property values per vertex
    std::vector<std::vector<std::int64_t>> faces;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < vertex_properties.size(); ++i) {
            if (vertex_properties[i] == name) return i;
        }
        throw std::out_of_range("PLY has no vertex property '" + name + "'");
    }
};

inline PlyData read_ply(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    auto fail = [&](const std::string& why) { return std::runtime_error("read_ply: " + path + ": " + why); };
    if (!std::getline(f, line) || line != "ply") throw fail("missing 'ply' magic");
    PlyData d;
    std::size_t n_vertex = 0, n_face = 0;
    std::string current;
    while (std::getline(f, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "ascii") throw fail("only ASCII PLY is supported");
        } else if (tok == "element") {
            std::size_t n = 0;
            ls >> current >> n;
            if (current == "vertex") n_vertex = n;
            else if (current == "face") n_face = n;
            else throw fail("unsupported element " + current);
        } else if (tok == "property") {
            if (current == "vertex") {
                std::string type, name;
                ls >> type >> name;
                d.vertex_properties.push_back(name);
            }
        } else if (tok == "end_header") {
            break;
        }
    }
    for (std::size_t i = 0; i < n_vertex; ++i) {
        if (!std::getline(f, line)) throw fail("truncated vertex list");
        std::istringstream ls(line);
        std::vector<double> row(d.vertex_properties.size());
        for (auto& v : row) {
            if (!(ls >> v)) throw fail("bad vertex row " + std::to_string(i));
        }
        d.vertices.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < n_face; ++i) {
        if (!std::getline(f, line)) throw fail("truncated face list");
        std::istringstream ls(line);
        std::size_t n = 0;
        ls >> n;
        std::vector<std::int64_t> idx(n);
        for (auto& v : idx) {
            if (!(ls >> v)) throw fail("bad face row " + std::to_string(i));
        }
        d.faces.push_back(std::move(idx));
    }
    return d;
}

}  // namespace colonsynth
