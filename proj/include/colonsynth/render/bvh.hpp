#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "colonsynth/core/vec3.hpp"
#include "colonsynth/geometry/mesh.hpp"

namespace colonsynth {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // need not be unit; hit distances are in units of |direction|
};

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    std::uint32_t triangle = 0;
    double u = 0.0;  // barycentric weight of vertex 1
    double v = 0.0;  // barycentric weight of vertex 2
};

/// Moller-Trumbore; returns t > t_min of the hit, or nothing. Back faces count.
inline std::optional<Hit> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                                             double t_min = 1e-9) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = cross(ray.direction, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-300) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = ray.origin - a;
    const double u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(ray.direction, q) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, q) * inv;
    if (!(t > t_min)) return std::nullopt;
    return Hit{t, 0, u, v};
}

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void grow(const Vec3& p) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
    void grow(const Aabb& b) {
        lo = min(lo, b.lo);
        hi = max(hi, b.hi);
    }
    bool valid() const { return lo.x <= hi.x; }
    double half_area() const {
        if (!valid()) return 0.0;
        const Vec3 e = hi - lo;
        return e.x * e.y + e.y * e.z + e.z * e.x;
    }
    double distance_squared(const Vec3& p) const {
        const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
        const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
        const double dz = std::max({lo.z - p.z, 0.0, p.z - hi.z});
        return dx * dx + dy * dy + dz * dz;
    }
};

/// Slab test against a box; returns the entry distance or +inf.
inline double ray_box_entry(const Vec3& origin, const Vec3& inv_dir, const Aabb& b, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const double o = axis == 0 ? origin.x : axis == 1 ? origin.y : origin.z;
        const double id = axis == 0 ? inv_dir.x : axis == 1 ? inv_dir.y : inv_dir.z;
        const double lo = axis == 0 ? b.lo.x : axis == 1 ? b.lo.y : b.lo.z;
        const double hi = axis == 0 ? b.hi.x : axis == 1 ? b.hi.y : b.hi.z;
        double tn = (lo - o) * id, tf = (hi - o) * id;
        if (tn > tf) std::swap(tn, tf);
        // NaN from 0 * inf (origin on a slab plane, zero direction component) keeps the interval.
        if (!(tn <= t0)) t0 = std::isnan(tn) ? t0 : tn;
        if (!(tf >= t1)) t1 = std::isnan(tf) ? t1 : tf;
        if (t0 > t1) return std::numeric_limits<double>::infinity();
    }
    return t0;
}

/// Bounding volume hierarchy over a triangle mesh, built with binned SAH.
/// Immutable after construction and safe to query from many threads.
class Bvh {
public:
    struct Node {
        Aabb box;
        std::uint32_t first = 0;  // first child index (inner) or first primitive (leaf)
        std::uint32_t count = 0;  // primitive count; 0 for inner nodes
    };

    /// Keeps a reference to `mesh`, which must outlive the hierarchy.
    explicit Bvh(TriMesh&&) = delete;
    explicit Bvh(const TriMesh& mesh) : mesh_(&mesh) {
        const std::size_t n = mesh.triangles.size();
        if (n == 0) throw std::invalid_argument("Bvh: mesh has no triangles");
        prims_.resize(n);
        boxes_.resize(n);
        centroids_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            prims_[i] = static_cast<std::uint32_t>(i);
            const auto& t = mesh.triangles[i];
            Aabb b;
            for (auto idx : t) b.grow(mesh.vertices[idx]);
            boxes_[i] = b;
            centroids_[i] = (b.lo + b.hi) * 0.5;
        }
        nodes_.reserve(2 * n / kLeafSize + 1);
        nodes_.push_back({});
        build(0, 0, static_cast<std::uint32_t>(n));
        boxes_.clear();
        boxes_.shrink_to_fit();
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    const TriMesh& mesh() const { return *mesh_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Nearest hit with t in (t_min, t_max).
    std::optional<Hit> intersect(const Ray& ray, double t_max = std::numeric_limits<double>::infinity(),
                                 double t_min = 1e-9) const {
        if (length_squared(ray.direction) == 0.0) throw std::invalid_argument("Bvh::intersect: zero ray direction");
        const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
        Hit best;
        best.t = t_max;
        bool found = false;
        std::array<std::uint32_t, 128> stack;
        std::size_t top = 0;
        if (ray_box_entry(ray.origin, inv, nodes_[0].box, best.t) == std::numeric_limits<double>::infinity()) {
            return std::nullopt;
        }
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            if (node.count > 0) {
                for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
                    const auto& tri = mesh_->triangles[prims_[k]];
                    const auto h = intersect_triangle(ray, mesh_->vertices[tri[0]], mesh_->vertices[tri[1]],
                                                      mesh_->vertices[tri[2]], t_min);
                    if (h && (h->t < best.t || (h->t == best.t && prims_[k] < best.triangle))) {
                        best = *h;
                        best.triangle = prims_[k];
                        found = true;
                    }
                }
                continue;
            }
            const std::uint32_t l = node.first, r = node.first + 1;
            const double tl = ray_box_entry(ray.origin, inv, nodes_[l].box, best.t);
            const double tr = ray_box_entry(ray.origin, inv, nodes_[r].box, best.t);
            // Push the farther child first so the nearer one is visited next.
            if (tl <= tr) {
                if (tr != std::numeric_limits<double>::infinity()) stack[top++] = r;
                if (tl != std::numeric_limits<double>::infinity()) stack[top++] = l;
            } else {
                if (tl != std::numeric_limits<double>::infinity()) stack[top++] = l;
                if (tr != std::numeric_limits<double>::infinity()) stack[top++] = r;
            }
        }
        if (!found) return std::nullopt;
        return best;
    }

    struct ClosestPoint {
        Vec3 point;
        double distance = std::numeric_limits<double>::infinity();
        std::uint32_t triangle = 0;
    };

    /// Closest point on the mesh surface to p.
    ClosestPoint closest_point(const Vec3& p) const {
        ClosestPoint best;
        double best_d2 = std::numeric_limits<double>::infinity();
        std::array<std::uint32_t, 128> stack;
        std::size_t top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            if (node.box.distance_squared(p) >= best_d2) continue;
            if (node.count > 0) {
                for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
                    const auto& tri = mesh_->triangles[prims_[k]];
                    const Vec3 q = closest_point_on_triangle(p, mesh_->vertices[tri[0]], mesh_->vertices[tri[1]],
                                                             mesh_->vertices[tri[2]]);
                    const double d2 = length_squared(q - p);
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best.point = q;
                        best.triangle = prims_[k];
                    }
                }
                continue;
            }
            const std::uint32_t l = node.first, r = node.first + 1;
            const double dl = nodes_[l].box.distance_squared(p), dr = nodes_[r].box.distance_squared(p);
            if (dl <= dr) {
                stack[top++] = r;
                stack[top++] = l;
            } else {
                stack[top++] = l;
                stack[top++] = r;
            }
        }
        best.distance = std::sqrt(best_d2);
        return best;
    }

private:
    static constexpr std::uint32_t kLeafSize = 4;
    static constexpr int kBins = 12;

    static double axis_of(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

    void build(std::uint32_t node_index, std::uint32_t first, std::uint32_t count) {
        Aabb box, cbox;
        for (std::uint32_t k = first; k < first + count; ++k) {
            box.grow(boxes_[prims_[k]]);
            cbox.grow(centroids_[prims_[k]]);
        }
        nodes_[node_index].box = box;
        if (count <= kLeafSize) {
            make_leaf(node_index, first, count);
            return;
        }
        // Binned SAH over the widest-spread axes.
        double best_cost = std::numeric_limits<double>::infinity();
        int best_axis = -1, best_split = 0;
        for (int axis = 0; axis < 3; ++axis) {
            const double lo = axis_of(cbox.lo, axis), hi = axis_of(cbox.hi, axis);
            if (!(hi > lo)) continue;
            std::array<Aabb, kBins> bin_box{};
            std::array<std::uint32_t, kBins> bin_count{};
            const double scale = kBins / (hi - lo);
            for (std::uint32_t k = first; k < first + count; ++k) {
                const int b = std::min(kBins - 1, static_cast<int>((axis_of(centroids_[prims_[k]], axis) - lo) * scale));
                bin_box[b].grow(boxes_[prims_[k]]);
                ++bin_count[b];
            }
            std::array<double, kBins - 1> left_cost{};
            Aabb acc;
            std::uint32_t n = 0;
            for (int b = 0; b < kBins - 1; ++b) {
                acc.grow(bin_box[b]);
                n += bin_count[b];
                left_cost[b] = n * acc.half_area();
            }
            acc = Aabb{};
            n = 0;
            for (int b = kBins - 1; b > 0; --b) {
                acc.grow(bin_box[b]);
                n += bin_count[b];
                const double cost = left_cost[b - 1] + n * acc.half_area();
                if (cost < best_cost) {
                    best_cost = cost;
                    best_axis = axis;
                    best_split = b;
                }
            }
        }
        const double leaf_cost = count * box.half_area();
        if (best_axis < 0 || (best_cost >= leaf_cost && count <= 4 * kLeafSize)) {
            if (best_axis < 0 && count > kLeafSize) {
                // Coincident centroids: split in the middle of the list.
                split_and_recurse(node_index, first, count, count / 2);
                return;
            }
            make_leaf(node_index, first, count);
            return;
        }
        const double lo = axis_of(cbox.lo, best_axis), hi = axis_of(cbox.hi, best_axis);
        const double scale = kBins / (hi - lo);
        auto* begin = prims_.data() + first;
        auto* mid = std::stable_partition(begin, begin + count, [&](std::uint32_t p) {
            const int b = std::min(kBins - 1, static_cast<int>((axis_of(centroids_[p], best_axis) - lo) * scale));
            return b < best_split;
        });
        auto left = static_cast<std::uint32_t>(mid - begin);
        if (left == 0 || left == count) left = count / 2;
        split_and_recurse(node_index, first, count, left);
    }

    void split_and_recurse(std::uint32_t node_index, std::uint32_t first, std::uint32_t count, std::uint32_t left) {
        const auto child = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({});
        nodes_.push_back({});
        nodes_[node_index].first = child;
        nodes_[node_index].count = 0;
        build(child, first, left);
        build(child + 1, first + left, count - left);
    }

    void make_leaf(std::uint32_t node_index, std::uint32_t first, std::uint32_t count) {
        nodes_[node_index].first = first;
        nodes_[node_index].count = count;
    }

    const TriMesh* mesh_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> prims_;
    std::vector<Aabb> boxes_;
    std::vector<Vec3> centroids_;
};

/// Brute-force nearest hit over every triangle; the reference the BVH must match.
inline std::optional<Hit> intersect_brute_force(const TriMesh& mesh, const Ray& ray,
                                                double t_max = std::numeric_limits<double>::infinity(),
                                                double t_min = 1e-9) {
    std::optional<Hit> best;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        const auto h = intersect_triangle(ray, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], t_min);
        if (h && h->t < t_max && (!best || h->t < best->t)) {
            best = *h;
            best->triangle = static_cast<std::uint32_t>(i);
        }
    }
    return best;
}

}  // namespace colonsynth
