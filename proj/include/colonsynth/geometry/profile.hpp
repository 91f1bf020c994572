#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "colonsynth/core/vec3.hpp"
#include "colonsynth/geometry/centerline.hpp"

namespace colonsynth {

enum class LumenShape { Circular, Oval, Triangular };

/// Parametric lumen cross-section. All shapes are normalized to the area of a
/// circle of radius `radius`, so `radius` is the equal-area radius.
struct CrossSection {
    LumenShape shape = LumenShape::Circular;
    double radius = 1.0;          // cm
    double eccentricity = 0.0;    // oval only, in [0, 1)
    double lobe_amplitude = 0.0;  // triangular only, in [0, 1)
    double orientation = 0.0;     // rad

    static CrossSection circle(double r) { return {LumenShape::Circular, r, 0.0, 0.0, 0.0}; }
    static CrossSection oval(double r, double e, double orient = 0.0) { return {LumenShape::Oval, r, e, 0.0, orient}; }
    static CrossSection triangle(double r, double lobe, double orient = 0.0) {
        return {LumenShape::Triangular, r, 0.0, lobe, orient};
    }

    /// Radius at angle theta; strictly positive and 2*pi periodic.
    double operator()(double theta) const {
        const double t = theta - orientation;
        switch (shape) {
            case LumenShape::Circular:
                return radius;
            case LumenShape::Oval: {
                // Semi-axes a*b = radius^2 with b = a * sqrt(1 - e^2).
                const double k = std::pow(1.0 - eccentricity * eccentricity, 0.25);
                const double a = radius / k, b = radius * k;
                const double c = std::cos(t), s = std::sin(t);
                return a * b / std::sqrt(b * b * c * c + a * a * s * s);
            }
            case LumenShape::Triangular:
                // Rounded triangle; the area of r = R(1 + A cos 3t) is pi R^2 (1 + A^2/2).
                return radius * (1.0 + lobe_amplitude * std::cos(3.0 * t)) /
                       std::sqrt(1.0 + 0.5 * lobe_amplitude * lobe_amplitude);
        }
        return radius;
    }

    void validate() const {
        if (!(radius > 0.0)) throw std::invalid_argument("CrossSection: radius must be positive");
        if (eccentricity < 0.0 || eccentricity >= 1.0) throw std::invalid_argument("CrossSection: eccentricity out of [0,1)");
        if (lobe_amplitude < 0.0 || lobe_amplitude >= 1.0) throw std::invalid_argument("CrossSection: lobe amplitude out of [0,1)");
    }
};

/// Cross-sections bound to centerline intervals, blended with a smoothstep
/// across each boundary so the radius field stays continuous along the tube.
class LumenProfile {
public:
    struct Span {
        double s_begin;
        double s_end;
        CrossSection section;
    };

    LumenProfile() = default;
    LumenProfile(std::vector<Span> spans, double blend_cm) : spans_(std::move(spans)), blend_cm_(blend_cm) {
        if (spans_.empty()) throw std::invalid_argument("LumenProfile: no spans");
        for (const auto& sp : spans_) sp.section.validate();
    }

    static LumenProfile uniform(const CrossSection& section) {
        return LumenProfile({{0.0, std::numeric_limits<double>::infinity(), section}}, 0.0);
    }

    const std::vector<Span>& spans() const { return spans_; }

    double radius(double s, double theta) const {
        const std::size_t i = span_index(s);
        const double r_here = spans_[i].section(theta);
        if (blend_cm_ <= 0.0) return r_here;
        // Blend toward the neighbor whose boundary is within half the blend width.
        if (i + 1 < spans_.size()) {
            const double d = spans_[i].s_end - s;
            if (d < 0.5 * blend_cm_) {
                const double w = smooth(0.5 - d / blend_cm_);
                return (1.0 - w) * r_here + w * spans_[i + 1].section(theta);
            }
        }
        if (i > 0) {
            const double d = s - spans_[i].s_begin;
            if (d < 0.5 * blend_cm_) {
                const double w = smooth(0.5 - d / blend_cm_);
                return (1.0 - w) * r_here + w * spans_[i - 1].section(theta);
            }
        }
        return r_here;
    }

    /// Equal-area radius of the blended section at s.
    double equal_area_radius(double s, int samples = 128) const {
        double acc = 0.0;
        for (int k = 0; k < samples; ++k) {
            const double r = radius(s, 2.0 * kPi * k / samples);
            acc += r * r;
        }
        return std::sqrt(acc / samples);
    }

private:
    static double smooth(double x) {
        x = std::clamp(x, 0.0, 1.0);
        return x * x * (3.0 - 2.0 * x);
    }

    std::size_t span_index(double s) const {
        for (std::size_t i = 0; i + 1 < spans_.size(); ++i) {
            if (s < spans_[i].s_end) return i;
        }
        return spans_.size() - 1;
    }

    std::vector<Span> spans_;
    double blend_cm_ = 0.0;
};

/// Per-segment circles at the nominal diameters.
inline LumenProfile circular_profile(const ColonCenterline& c, double blend_cm = 6.0) {
    std::vector<LumenProfile::Span> spans;
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        spans.push_back({c.segment_start[i], c.segment_start[i + 1],
                         CrossSection::circle(0.5 * c.segments[i].nominal_diameter_cm)});
    }
    return LumenProfile(std::move(spans), blend_cm);
}

/// Segment-specific lumen shapes: ascending triangular, transverse circular,
/// descending oval. Sigmoid and rectum are mildly oval.
struct DeformedLumenParams {
    double oval_eccentricity = 0.7;   // drawn in [0.6, 0.85]
    double lobe_amplitude = 0.18;     // triangular lobes
    double orientation = 0.0;
};

inline LumenProfile deformed_profile(const ColonCenterline& c, const DeformedLumenParams& p, double blend_cm = 6.0) {
    std::vector<LumenProfile::Span> spans;
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        const double r = 0.5 * c.segments[i].nominal_diameter_cm;
        CrossSection sec = CrossSection::circle(r);
        switch (c.segments[i].name) {
            case SegmentName::Ascending: sec = CrossSection::triangle(r, p.lobe_amplitude, p.orientation); break;
            case SegmentName::Transverse: sec = CrossSection::circle(r); break;
            case SegmentName::Descending: sec = CrossSection::oval(r, p.oval_eccentricity, p.orientation); break;
            case SegmentName::Sigmoid: sec = CrossSection::oval(r, 0.5 * p.oval_eccentricity, p.orientation + 0.6); break;
            case SegmentName::Rectum: sec = CrossSection::oval(r, 0.4 * p.oval_eccentricity, p.orientation); break;
        }
        spans.push_back({c.segment_start[i], c.segment_start[i + 1], sec});
    }
    return LumenProfile(std::move(spans), blend_cm);
}

}  // namespace colonsynth
