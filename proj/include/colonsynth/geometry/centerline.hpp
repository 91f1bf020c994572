#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/core/vec3.hpp"

namespace colonsynth {

enum class SegmentName { Ascending, Transverse, Descending, Sigmoid, Rectum };

inline std::string_view to_string(SegmentName n) {
    switch (n) {
        case SegmentName::Ascending: return "ascending";
        case SegmentName::Transverse: return "transverse";
        case SegmentName::Descending: return "descending";
        case SegmentName::Sigmoid: return "sigmoid";
        case SegmentName::Rectum: return "rectum";
    }
    return "unknown";
}

struct SegmentSpec {
    SegmentName name;
    double length_cm;
    double nominal_diameter_cm;
};

/// Ascending 30, transverse 58, descending 30, sigmoid 49, rectum 20 cm.
inline std::vector<SegmentSpec> default_segments() {
    return {
        {SegmentName::Ascending, 30.0, 6.6},
        {SegmentName::Transverse, 58.0, 5.8},
        {SegmentName::Descending, 30.0, 5.0},
        {SegmentName::Sigmoid, 49.0, 4.6},
        {SegmentName::Rectum, 20.0, 5.4},
    };
}

struct CenterlineOptions {
    double jitter_cm = 1.0;          // max orthogonal displacement of interior control points
    double flexure_radius_cm = 6.0;  // bend radius at hepatic and splenic flexures
    int length_fit_iterations = 30;
};

/// C1 piecewise cubic Bezier curve with an arc-length parameterization.
class Centerline {
public:
    Centerline() = default;

    /// Interpolating cubic Bezier spline. The tangent direction at an interior
    /// knot bisects its two chords and each piece's handles are a third of its
    /// own chord, so unevenly spaced knots do not overshoot. The unit tangent
    /// is continuous everywhere.
    explicit Centerline(std::vector<Vec3> control_points) : control_points_(std::move(control_points)) {
        if (control_points_.size() < 2) throw std::invalid_argument("Centerline: need >= 2 control points");
        const std::size_t n = control_points_.size();
        std::vector<Vec3> directions(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) {
                directions[i] = normalize(control_points_[1] - control_points_[0]);
            } else if (i == n - 1) {
                directions[i] = normalize(control_points_[n - 1] - control_points_[n - 2]);
            } else {
                directions[i] = normalize(normalize(control_points_[i + 1] - control_points_[i]) +
                                          normalize(control_points_[i] - control_points_[i - 1]));
            }
        }
        pieces_.reserve(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            // Handle length of a circular arc with the same end tangents; a third of the chord when straight.
            const double turn = angle_between(directions[i], directions[i + 1]);
            const double c = std::cos(0.25 * turn);
            const double handle = distance(control_points_[i], control_points_[i + 1]) / (3.0 * c * c);
            pieces_.push_back({control_points_[i], control_points_[i] + directions[i] * handle,
                               control_points_[i + 1] - directions[i + 1] * handle, control_points_[i + 1]});
        }
        build_arclength_table();
    }

    const std::vector<Vec3>& control_points() const { return control_points_; }
    std::size_t piece_count() const { return pieces_.size(); }
    double length() const { return table_s_.empty() ? 0.0 : table_s_.back(); }

    /// Arc length at which control point `knot` is reached.
    double knot_arclength(std::size_t knot) const {
        return knot == 0 ? 0.0 : table_s_[knot * kSubdiv];
    }

    Vec3 point(double s) const {
        const auto [piece, t] = locate(s);
        return eval(pieces_[piece], t);
    }

    /// Raw derivative dC/dt of the underlying Bezier piece.
    Vec3 derivative(double s) const {
        const auto [piece, t] = locate(s);
        return eval_derivative(pieces_[piece], t);
    }

    /// Unit tangent; throws on a degenerate (zero-length) derivative.
    Vec3 tangent(double s) const {
        const Vec3 d = derivative(s);
        const double len = length_of(d);
        if (!(len > 1e-12)) {
            throw std::runtime_error("Centerline: degenerate tangent at s=" + std::to_string(s));
        }
        return d / len;
    }

    /// Arc-length parameter of the point on the curve nearest to `p`.
    double project(const Vec3& p) const {
        const double L = length();
        const int samples = std::max(64, static_cast<int>(L * 4.0));
        double best_s = 0.0, best_d = std::numeric_limits<double>::max();
        for (int i = 0; i <= samples; ++i) {
            const double s = L * i / samples;
            const double d = length_squared(point(s) - p);
            if (d < best_d) { best_d = d; best_s = s; }
        }
        // Golden-section refinement in the bracketing interval.
        double lo = std::max(0.0, best_s - L / samples), hi = std::min(L, best_s + L / samples);
        constexpr double kPhi = 0.6180339887498949;
        for (int it = 0; it < 60; ++it) {
            const double a = hi - (hi - lo) * kPhi, b = lo + (hi - lo) * kPhi;
            if (length_squared(point(a) - p) < length_squared(point(b) - p)) hi = b; else lo = a;
        }
        return 0.5 * (lo + hi);
    }

private:
    using Piece = std::array<Vec3, 4>;
    static constexpr std::size_t kSubdiv = 32;

    static double length_of(const Vec3& v) { return colonsynth::length(v); }

    static Vec3 eval(const Piece& p, double t) {
        const double u = 1.0 - t;
        return p[0] * (u * u * u) + p[1] * (3.0 * u * u * t) + p[2] * (3.0 * u * t * t) + p[3] * (t * t * t);
    }

    static Vec3 eval_derivative(const Piece& p, double t) {
        const double u = 1.0 - t;
        return (p[1] - p[0]) * (3.0 * u * u) + (p[2] - p[1]) * (6.0 * u * t) + (p[3] - p[2]) * (3.0 * t * t);
    }

    // 8-point Gauss-Legendre integral of the speed over [t0, t1].
    static double speed_integral(const Piece& p, double t0, double t1) {
        static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267,
                                                    -0.5255324099163290, -0.1834346424956498,
                                                    0.1834346424956498,  0.5255324099163290,
                                                    0.7966664774136267,  0.9602898564975363};
        static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745,
                                                    0.3137066458778873, 0.3626837833783620,
                                                    0.3626837833783620, 0.3137066458778873,
                                                    0.2223810344533745, 0.1012285362903763};
        const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) s += w[i] * length_of(eval_derivative(p, mid + half * x[i]));
        return s * half;
    }

    void build_arclength_table() {
        table_s_.assign(pieces_.size() * kSubdiv + 1, 0.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            for (std::size_t j = 0; j < kSubdiv; ++j) {
                const double t0 = static_cast<double>(j) / kSubdiv, t1 = static_cast<double>(j + 1) / kSubdiv;
                acc += speed_integral(pieces_[k], t0, t1);
                table_s_[k * kSubdiv + j + 1] = acc;
            }
        }
    }

    // (piece index, Bezier parameter) for arc length s, clamped to [0, L].
    std::pair<std::size_t, double> locate(double s) const {
        const double L = length();
        s = std::clamp(s, 0.0, L);
        auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
        std::size_t cell = it == table_s_.begin() ? 0 : static_cast<std::size_t>(it - table_s_.begin()) - 1;
        cell = std::min(cell, table_s_.size() - 2);
        const std::size_t piece = cell / kSubdiv;
        const std::size_t sub = cell % kSubdiv;
        const Piece& p = pieces_[piece];
        const double t0 = static_cast<double>(sub) / kSubdiv, t1 = static_cast<double>(sub + 1) / kSubdiv;
        const double s0 = table_s_[cell], s1 = table_s_[cell + 1];
        if (s1 - s0 <= 0.0) return {piece, t0};
        // Newton on s(t) = s, starting from linear interpolation; safeguarded to [t0, t1].
        double t = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        for (int it2 = 0; it2 < 8; ++it2) {
            const double f = s0 + speed_integral(p, t0, t) - s;
            const double d = length_of(eval_derivative(p, t));
            if (d <= 0.0) break;
            const double next = std::clamp(t - f / d, t0, t1);
            if (std::abs(next - t) < 1e-15) { t = next; break; }
            t = next;
        }
        return {piece, t};
    }

    std::vector<Vec3> control_points_;
    std::vector<Piece> pieces_;
    std::vector<double> table_s_;
};

/// Centerline plus the per-segment bookkeeping needed downstream.
struct ColonCenterline {
    Centerline curve;
    std::vector<SegmentSpec> segments;
    std::vector<double> segment_start;     // arc length where each segment starts; plus total at end
    std::vector<double> flexure_angles_deg; // interior limb angle at each flexure (hepatic, splenic)

    double length() const { return curve.length(); }

    std::size_t segment_at(double s) const {
        for (std::size_t i = 0; i + 1 < segment_start.size(); ++i) {
            if (s < segment_start[i + 1]) return i;
        }
        return segments.size() - 1;
    }

    double hepatic_flexure_deg() const { return flexure_angles_deg.size() > 0 ? flexure_angles_deg[0] : 0.0; }
    double splenic_flexure_deg() const { return flexure_angles_deg.size() > 1 ? flexure_angles_deg[1] : 0.0; }
};

namespace detail {

struct TemplateStep {
    Vec3 direction;
    double fraction;  // of the segment length
};

// Hand-tuned direction sequences, x toward the patient's left, y cranial, z anterior.
// The first direction of a segment entering a flexure is recomputed from the
// target interior angle; the template value only picks the turning plane.
inline std::vector<TemplateStep> segment_template(SegmentName name) {
    switch (name) {
        case SegmentName::Ascending:
            return {{{0.10, 1.0, 0.10}, 0.5}, {{0.0, 1.0, 0.05}, 0.5}};
        case SegmentName::Transverse:
            return {{{0.80, -0.55, 0.35}, 0.2}, {{1.0, -0.15, 0.3}, 0.22}, {{1.0, 0.1, 0.0}, 0.2},
                    {{0.8, 0.45, -0.3}, 0.18}, {{0.2, 1.0, -0.15}, 0.2}};
        case SegmentName::Descending:
            return {{{0.60, -1.0, -0.3}, 0.5}, {{-0.1, -1.0, -0.1}, 0.5}};
        case SegmentName::Sigmoid:
            return {{{-0.2, -1.0, 0.3}, 0.14}, {{-0.6, -0.6, 0.7}, 0.14}, {{-0.7, 0.2, 0.6}, 0.14},
                    {{-0.4, 0.7, -0.1}, 0.13}, {{-0.3, 0.4, -0.6}, 0.12}, {{0.0, -0.4, -0.9}, 0.13},
                    {{0.0, -1.0, -0.3}, 0.2}};
        case SegmentName::Rectum:
            return {{{0.05, -1.0, -0.35}, 0.5}, {{0.0, -1.0, 0.25}, 0.5}};
    }
    return {};
}

/// Target interior angle at the junction leaving `from`, or 0 for none.
inline double flexure_target_deg(SegmentName from, SegmentName to) {
    if (from == SegmentName::Ascending && to == SegmentName::Transverse) return 40.0;  // hepatic
    if (from == SegmentName::Transverse && to == SegmentName::Descending) return 30.0; // splenic
    return 0.0;
}

// Interior angle between the limbs, from the unit tangents where they enter and leave the bend.
inline double interior_angle_deg(const Centerline& c, double s_in, double s_out) {
    return rad_to_deg(angle_between(-c.tangent(s_in), c.tangent(s_out)));
}

}  // namespace detail

/// Builds a colon centerline through jittered template control points. Each
/// segment is rescaled until its arc length matches its spec. Flexures get a
/// circular bend of `flexure_radius_cm` whose midpoint is the segment boundary.
inline ColonCenterline build_centerline(const std::vector<SegmentSpec>& specs, std::uint64_t seed,
                                        const CenterlineOptions& opts = {}) {
    if (specs.empty()) throw std::invalid_argument("build_centerline: no segments");
    for (const auto& s : specs) {
        if (!(s.length_cm > 0.0)) {
            throw std::invalid_argument("build_centerline: segment '" + std::string(to_string(s.name)) +
                                        "' has non-positive length");
        }
        if (!(s.nominal_diameter_cm > 0.0)) {
            throw std::invalid_argument("build_centerline: segment '" + std::string(to_string(s.name)) +
                                        "' has non-positive diameter");
        }
    }

    // Per-segment step templates; a lone segment is a straight run.
    std::vector<std::vector<detail::TemplateStep>> templates;
    if (specs.size() == 1) {
        templates.push_back({{{0.0, 1.0, 0.0}, 1.0}});
    } else {
        for (const auto& s : specs) templates.push_back(detail::segment_template(s.name));
    }
    std::vector<double> flexure_target(specs.size(), 0.0);  // at the start of segment i
    for (std::size_t i = 1; i < specs.size(); ++i) {
        flexure_target[i] = detail::flexure_target_deg(specs[i - 1].name, specs[i].name);
        if (flexure_target[i] > 0.0) {
            const Vec3 back = -normalize(templates[i - 1].back().direction);
            const Vec3 hint = normalize(templates[i].front().direction);
            const Vec3 axis = normalize(cross(back, hint));
            templates[i].front().direction = rotate(back, axis, deg_to_rad(flexure_target[i]));
        }
    }

    // Jitter of step endpoints, drawn once so the length fit is a fixed point.
    Rng rng(derive_seed(seed, 0xCE17E));
    std::vector<std::vector<std::pair<double, double>>> jitter(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t k = 0; k < templates[i].size(); ++k) {
            const double radius = opts.jitter_cm * std::sqrt(rng.uniform());
            const double phi = rng.uniform(0.0, 2.0 * kPi);
            jitter[i].emplace_back(radius * std::cos(phi), radius * std::sin(phi));
        }
    }

    std::vector<double> scale(specs.size(), 1.0);
    std::vector<std::size_t> segment_knot(specs.size() + 1, 0);
    std::vector<std::pair<std::size_t, std::size_t>> bend_knots(specs.size(), {0, 0});

    auto assemble = [&] {
        std::vector<Vec3> pts{Vec3{0, 0, 0}};
        std::vector<char> jitterable{0};
        std::vector<std::pair<double, double>> offsets{{0.0, 0.0}};
        Vec3 cursor{0, 0, 0};
        segment_knot[0] = 0;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (i > 0 && flexure_target[i] > 0.0) {
                // Circular bend from the previous heading to this segment's heading.
                const Vec3 a = normalize(templates[i - 1].back().direction);
                const Vec3 b = normalize(templates[i].front().direction);
                const double theta = angle_between(a, b);
                const Vec3 n = normalize(cross(a, b));
                const Vec3 to_center = normalize(cross(n, a));
                const Vec3 center = cursor + to_center * opts.flexure_radius_cm;
                constexpr int kArcPoints = 8;
                // Collinear guard points one arc step outside the bend pin the
                // Catmull-Rom tangents to the limb directions.
                const double guard = opts.flexure_radius_cm * theta / kArcPoints;
                pts.insert(pts.end() - 1, cursor - a * guard);
                jitterable.insert(jitterable.end() - 1, 0);
                offsets.insert(offsets.end() - 1, {0.0, 0.0});
                bend_knots[i].first = pts.size() - 2;
                for (int k = 1; k <= kArcPoints; ++k) {
                    const double phi = theta * k / kArcPoints;
                    pts.push_back(center + rotate(-to_center, n, phi) * opts.flexure_radius_cm);
                    jitterable.push_back(0);
                    offsets.emplace_back(0.0, 0.0);
                    if (k == kArcPoints / 2) segment_knot[i] = pts.size() - 1;
                }
                cursor = pts.back();
                pts.push_back(cursor + b * guard);
                bend_knots[i].second = pts.size() - 1;
                jitterable.push_back(0);
                offsets.emplace_back(0.0, 0.0);
            } else {
                segment_knot[i] = pts.size() - 1;
            }
            for (std::size_t k = 0; k < templates[i].size(); ++k) {
                const auto& step = templates[i][k];
                cursor += normalize(step.direction) * (step.fraction * specs[i].length_cm * scale[i]);
                pts.push_back(cursor);
                const bool is_last = (i + 1 == specs.size()) && (k + 1 == templates[i].size());
                // Points within two steps of a flexure stay on the template so the limbs
                // leave the bend at the target angle.
                const bool before_flexure = (k + 2 >= templates[i].size()) && (i + 1 < specs.size()) &&
                                            flexure_target[i + 1] > 0.0;
                const bool after_flexure = k <= 1 && flexure_target[i] > 0.0;
                jitterable.push_back(is_last || before_flexure || after_flexure ? 0 : 1);
                offsets.push_back(jitter[i][k]);
            }
        }
        segment_knot[specs.size()] = pts.size() - 1;
        std::vector<Vec3> jittered = pts;
        for (std::size_t idx = 1; idx + 1 < pts.size(); ++idx) {
            if (!jitterable[idx]) continue;
            const Vec3 dir = normalize(pts[idx + 1] - pts[idx - 1]);
            const Vec3 u = any_orthogonal(dir);
            const Vec3 v = cross(dir, u);
            jittered[idx] = pts[idx] + u * offsets[idx].first + v * offsets[idx].second;
        }
        return Centerline(std::move(jittered));
    };

    Centerline curve = assemble();
    for (int it = 0; it < opts.length_fit_iterations; ++it) {
        bool converged = true;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const double measured = curve.knot_arclength(segment_knot[i + 1]) - curve.knot_arclength(segment_knot[i]);
            const double ratio = specs[i].length_cm / measured;
            if (std::abs(ratio - 1.0) > 1e-12) converged = false;
            scale[i] *= ratio;
        }
        if (converged) break;
        curve = assemble();
    }

    ColonCenterline out;
    out.segments = specs;
    for (std::size_t i = 0; i <= specs.size(); ++i) out.segment_start.push_back(curve.knot_arclength(segment_knot[i]));
    for (std::size_t i = 1; i < specs.size(); ++i) {
        if (flexure_target[i] <= 0.0) continue;
        out.flexure_angles_deg.push_back(detail::interior_angle_deg(curve, curve.knot_arclength(bend_knots[i].first),
                                                                    curve.knot_arclength(bend_knots[i].second)));
    }
    out.curve = std::move(curve);
    return out;
}

}  // namespace colonsynth
