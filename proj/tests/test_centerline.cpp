#include <gtest/gtest.h>

#include <cmath>

#include "colonsynth/geometry/centerline.hpp"

using namespace colonsynth;

TEST(Centerline, DefaultModelLengthNear187) {
    const auto c = build_centerline(default_segments(), 1);
    EXPECT_NEAR(c.length(), 187.0, 10.0);
}

TEST(Centerline, SegmentLengthsMatchSpecs) {
    const auto specs = default_segments();
    const auto c = build_centerline(specs, 11);
    ASSERT_EQ(c.segment_start.size(), specs.size() + 1);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_NEAR(c.segment_start[i + 1] - c.segment_start[i], specs[i].length_cm, 0.5) << to_string(specs[i].name);
    }
}

TEST(Centerline, FlexureAnglesNearTargets) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c = build_centerline(default_segments(), seed);
        EXPECT_NEAR(c.hepatic_flexure_deg(), 40.0, 5.0);
        EXPECT_NEAR(c.splenic_flexure_deg(), 30.0, 5.0);
        EXPECT_LT(c.hepatic_flexure_deg(), 90.0);
        EXPECT_LT(c.splenic_flexure_deg(), 90.0);
    }
}

TEST(Centerline, SingleStraightSegmentIsExact) {
    const auto c = build_centerline({{SegmentName::Ascending, 10.0, 4.0}}, 3);
    EXPECT_NEAR(c.length(), 10.0, 1e-9);
    const Vec3 mid = c.curve.point(5.0);
    EXPECT_NEAR(distance(mid, c.curve.point(0.0)), 5.0, 1e-9);
}

TEST(Centerline, DeterministicForSeed) {
    const auto a = build_centerline(default_segments(), 42);
    const auto b = build_centerline(default_segments(), 42);
    EXPECT_EQ(a.curve.control_points(), b.curve.control_points());
    const auto c = build_centerline(default_segments(), 43);
    EXPECT_NE(a.curve.control_points(), c.curve.control_points());
}

TEST(Centerline, RejectsNonPositiveLength) {
    EXPECT_THROW(build_centerline({{SegmentName::Ascending, 0.0, 4.0}}, 1), std::invalid_argument);
    EXPECT_THROW(build_centerline({{SegmentName::Ascending, -3.0, 4.0}}, 1), std::invalid_argument);
    EXPECT_THROW(build_centerline({}, 1), std::invalid_argument);
}

TEST(Centerline, TangentContinuousAlongCurve) {
    const auto c = build_centerline(default_segments(), 5);
    const double L = c.length();
    Vec3 prev = c.curve.tangent(0.0);
    for (int k = 1; k <= 4000; ++k) {
        const Vec3 t = c.curve.tangent(L * k / 4000.0);
        EXPECT_NEAR(length(t), 1.0, 1e-9);
        // 4.7 cm steps can only turn the tangent a little if it is continuous.
        EXPECT_GT(dot(prev, t), 0.95) << "at k=" << k;
        prev = t;
    }
}

TEST(Centerline, ArcLengthParameterization) {
    const auto c = build_centerline(default_segments(), 8);
    // Chord of a short step approximates the arc step.
    for (double s = 1.0; s < c.length() - 1.0; s += 7.3) {
        EXPECT_NEAR(distance(c.curve.point(s), c.curve.point(s + 0.01)), 0.01, 1e-5);
    }
}

TEST(Centerline, ProjectRecoversArcLength) {
    const auto c = build_centerline(default_segments(), 2);
    for (double s : {3.0, 40.0, 90.5, 150.0, 180.0}) {
        EXPECT_NEAR(c.curve.project(c.curve.point(s)), s, 1e-4);
    }
}
