#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "colonsynth/geometry/folds.hpp"
#include "test_support.hpp"

using namespace colonsynth;
using colonsynth::fixtures::straight_cylinder;
using colonsynth::fixtures::straight_line;

namespace {
double min_ring_diameter(const TriMesh& m) {
    double d = 1e9;
    for (std::size_t i = 0; i < m.tube->axial_steps; ++i) d = std::min(d, 2.0 * ring_mean_radius(m, i));
    return d;
}
}  // namespace

TEST(Folds, SingleFoldHitsRequestedDiameter) {
    const auto line = straight_line(40);
    const auto tube = straight_cylinder(40, 2.5, 600, 96);
    FoldSpec f;
    f.axial_positions = {20.0};
    f.diameters = {2.8};
    const auto out = apply_folds(tube, f, line);
    EXPECT_NEAR(min_ring_diameter(out), 2.8, 0.05 * 2.8);
}

TEST(Folds, DeformationDecaysBeyondTwoWidths) {
    const auto line = straight_line(40);
    const auto tube = straight_cylinder(40, 2.5, 600, 96);
    FoldSpec f;
    f.axial_positions = {20.0};
    f.diameters = {3.5};
    const auto out = apply_folds(tube, f, line);
    const TubeLayout& t = *out.tube;
    for (std::size_t i = 0; i < t.axial_steps; ++i) {
        const double ds = std::abs(t.ring_arclength[i] - 20.0);
        const double rel = std::abs(ring_mean_radius(out, i) - 2.5) / 2.5;
        if (ds > 2.0 * f.falloff_width) { EXPECT_LT(rel, 0.01) << "s=" << t.ring_arclength[i]; }
    }
    // And the radius profile is monotone on each side of the fold (smooth, no ripples).
    const auto c = static_cast<std::size_t>(std::lround(ring_coordinate(t, 20.0)));
    for (std::size_t i = c; i + 1 < t.axial_steps; ++i) EXPECT_LE(ring_mean_radius(out, i), ring_mean_radius(out, i + 1) + 1e-12);
    for (std::size_t i = 1; i <= c; ++i) EXPECT_GE(ring_mean_radius(out, i - 1) + 1e-12, ring_mean_radius(out, i));
}

TEST(Folds, EmptySpecIsBitIdentical) {
    const auto line = straight_line(20);
    const auto tube = straight_cylinder(20, 2.0, 100, 32);
    EXPECT_EQ(apply_folds(tube, FoldSpec{}, line), tube);
}

TEST(Folds, NonConstrictingFoldIsSkippedWithWarning) {
    const auto line = straight_line(20);
    const auto tube = straight_cylinder(20, 2.0, 100, 32);
    FoldSpec f;
    f.axial_positions = {10.0};
    f.diameters = {4.5};
    std::vector<std::string> warnings;
    const auto out = apply_folds(tube, f, line, &warnings);
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_EQ(out.vertices, tube.vertices);
}

TEST(Folds, PositionOutsideCenterlineRejected) {
    const auto line = straight_line(20);
    const auto tube = straight_cylinder(20, 2.0, 100, 32);
    FoldSpec f;
    f.axial_positions = {25.0};
    f.diameters = {2.9};
    EXPECT_THROW(apply_folds(tube, f, line), std::invalid_argument);
}

TEST(Folds, FortyFoldsFromSeedSevenAreSpacedThreeToSix) {
    FoldDrawParams p;
    p.min_count = p.max_count = 40;
    const auto f = draw_folds(187.0, 7, [](double) { return 5.5; }, p);
    ASSERT_EQ(f.count(), 40u);
    for (std::size_t i = 1; i < f.count(); ++i) {
        const double gap = f.axial_positions[i] - f.axial_positions[i - 1];
        EXPECT_GE(gap, 3.0);
        EXPECT_LE(gap, 6.0);
    }
    for (double d : f.diameters) {
        EXPECT_GE(d, 2.8);
        EXPECT_LE(d, 7.5);
    }
}

TEST(Folds, DrawnCountsStayInRangeAndFit) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto f = draw_folds(187.0, seed, [](double) { return 6.0; });
        EXPECT_GE(f.count(), 30u);
        EXPECT_LE(f.count(), 60u);
        EXPECT_GE(f.axial_positions.front(), 4.0 - 1e-9);
        EXPECT_LE(f.axial_positions.back(), 183.0 + 1e-9);
        for (std::size_t i = 1; i < f.count(); ++i) {
            const double gap = f.axial_positions[i] - f.axial_positions[i - 1];
            EXPECT_GE(gap, 3.0 - 1e-9);
            EXPECT_LE(gap, 6.0 + 1e-9);
        }
    }
}

TEST(Folds, FoldedColonKeepsRingsOrdered) {
    // Neighbouring rings stay strictly ordered along the tangent: no fold pushes one ring past another.
    const auto c = build_centerline(default_segments(), 3);
    const auto prof = circular_profile(c);
    const auto tube = extrude_tube(c.curve, prof, 600, 96);
    const auto f = draw_folds(c.length(), 3, [&](double s) { return 2.0 * prof.equal_area_radius(s); });
    const auto out = apply_folds(tube, f, c.curve);
    const TubeLayout& t = *out.tube;
    for (std::size_t i = 0; i + 1 < t.axial_steps; ++i) {
        for (std::size_t j = 0; j < t.radial_steps; j += 3) {
            const Vec3 step = out.vertices[t.index(i + 1, j)] - out.vertices[t.index(i, j)];
            EXPECT_GT(dot(step, t.ring_tangent[i]), 0.0);
        }
    }
}
