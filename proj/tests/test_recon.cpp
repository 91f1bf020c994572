#include <gtest/gtest.h>

#include <cmath>

#include "colonsynth/recon/reconstruct.hpp"
#include "colonsynth/render/bvh.hpp"
#include "colonsynth/render/renderer.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace colonsynth;

namespace {
Intrinsics with_focal(std::size_t w, std::size_t h, double f) {
    Intrinsics k = Intrinsics::for_image(w, h);
    k.focal_px = f;
    return k;
}
}  // namespace

TEST(Backproject, PrincipalPointAndFocalPixel) {
    const auto k = with_focal(1280, 2, 448.13);
    ImageD depth(1280, 2, kMaxDepthCm);
    depth(640, 1) = 5.0;              // u = 0, v = 0
    depth(640 + 448, 1) = 2.0;        // u = 448 px
    const auto cloud = backproject(depth, k);
    ASSERT_EQ(cloud.size(), 2u);
    EXPECT_EQ(cloud.points[0], (Vec3{0, 0, 5}));
    EXPECT_NEAR(cloud.points[1].x, 2.0 * 448.0 / 448.13, 1e-12);
    EXPECT_EQ(cloud.points[1].z, 2.0);
    const auto kf = with_focal(2000, 2, 448.13);
    ImageD df(2000, 2, kMaxDepthCm);
    df(1000, 1) = 2.0;
    EXPECT_EQ(backproject(df, kf).points[0], (Vec3{0, 0, 2}));
    EXPECT_THROW(backproject(ImageD(1281, 2, 1.0), k), std::invalid_argument);
}

TEST(Backproject, ExactValueAtFocalLength) {
    // With f chosen as an integer number of pixels, u = f maps to x = d.
    const auto k = with_focal(400, 4, 100.0);
    ImageD depth(400, 4, kMaxDepthCm);
    depth(300, 2) = 2.0;
    const auto c = backproject(depth, k);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.points[0], (Vec3{2, 0, 2}));
}

TEST(Backproject, MissesExcludedAndHomogeneous) {
    Rng rng(2);
    const auto k = Intrinsics::for_image(32, 24);
    auto depth = oracle::random_image(32, 24, rng, 0.5, 12.0);
    depth(3, 3) = kMaxDepthCm;
    const auto a = backproject(depth, k);
    EXPECT_EQ(a.size(), 32u * 24u - 1u);
    ImageD twice = depth;
    for (std::size_t i = 0; i < twice.size(); ++i) twice[i] = std::min(2.0 * twice[i], kMaxDepthCm);
    const auto b = backproject(twice, k);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(b.points[i].x, 2.0 * a.points[i].x, 1e-12);
        EXPECT_NEAR(b.points[i].z, 2.0 * a.points[i].z, 1e-12);
    }
}

TEST(Ply, SinglePointAndCameraMarker) {
    PointCloud c;
    c.points = {{1.5, -2.25, 3.125}};
    const std::string path = ::testing::TempDir() + "one.ply";
    export_ply(c, path);
    const auto d = read_ply(path);
    ASSERT_EQ(d.vertices.size(), 1u);
    EXPECT_EQ(d.vertices[0][d.column("x")], 1.5);
    export_ply(c, path, Intrinsics::for_image(320, 270));
    const auto e = read_ply(path);
    ASSERT_EQ(e.vertices.size(), 6u);
    std::size_t tagged = 0;
    for (const auto& v : e.vertices) tagged += v[e.column("camera")] == 1.0;
    EXPECT_EQ(tagged, 5u);
    EXPECT_THROW(export_ply(PointCloud{}, path), std::invalid_argument);
}

TEST(Ply, RoundTripCoordinatesAndColours) {
    Rng rng(12);
    const auto k = Intrinsics::for_image(20, 16);
    const auto depth = oracle::random_image(20, 16, rng, 0.5, 20.0);
    RgbFrame rgb(20, 16);
    for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = {static_cast<std::uint8_t>(i), 7, 200};
    const auto cloud = backproject(depth, k, &rgb);
    const std::string path = ::testing::TempDir() + "cloud.ply";
    export_ply(cloud, path);
    const auto d = read_ply(path);
    ASSERT_EQ(d.vertices.size(), cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        EXPECT_NEAR(d.vertices[i][d.column("x")], cloud.points[i].x, 1e-6);
        EXPECT_NEAR(d.vertices[i][d.column("y")], cloud.points[i].y, 1e-6);
        EXPECT_NEAR(d.vertices[i][d.column("z")], cloud.points[i].z, 1e-6);
        EXPECT_EQ(d.vertices[i][d.column("red")], cloud.colors[i][0]);
    }
}

TEST(Surface25d, ConstantDepthIsPlanar) {
    const ImageD depth(6, 4, 3.5);
    const std::string path = ::testing::TempDir() + "surface.ply";
    export_surface(depth, path);
    const auto d = read_ply(path);
    ASSERT_EQ(d.vertices.size(), 24u);
    EXPECT_EQ(d.faces.size(), 2u * 5u * 3u);
    for (const auto& v : d.vertices) EXPECT_EQ(v[d.column("z")], 3.5);
    for (const auto& f : d.faces) {
        ASSERT_EQ(f.size(), 3u);
        for (auto i : f) EXPECT_LT(i, 24);
    }
}

TEST(Backproject, RenderRoundTripLandsOnMesh) {
    const auto mesh = fixtures::straight_cylinder(40, 2.5, 200, 96);
    const Bvh bvh(mesh);
    const auto K = Intrinsics::for_image(80, 68);
    CameraPose pose{{0.4, 3.0, -0.3}, normalize(Vec3{0.08, 1, 0.05}), {0, 0, 1}};
    pose.up = normalize(pose.up - pose.optical_axis * dot(pose.up, pose.optical_axis));
    const auto f = render_linear(bvh, assign_materials(1, 0, 1), pose, K, LightSource::at_camera(pose));
    const auto cloud = backproject(f.depth, K);
    ASSERT_GT(cloud.size(), 1000u);
    for (const auto& p : cloud.points) EXPECT_LT(bvh.closest_point(camera_to_world(pose, p)).distance, 1e-6);
}
