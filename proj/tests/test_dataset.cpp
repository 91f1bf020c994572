#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "colonsynth/dataset/collection.hpp"
#include "colonsynth/dataset/gamma.hpp"
#include "colonsynth/dataset/manifest.hpp"
#include "colonsynth/dataset/video.hpp"
#include "colonsynth/render/png_io.hpp"
#include "oracles.hpp"

using namespace colonsynth;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::path(::testing::TempDir()) / name;
    fs::remove_all(d);
    return d;
}

VideoSpec tiny(int level, std::uint64_t seed, std::size_t frames) {
    VideoSpec s = VideoSpec::desk(level, seed);
    s.frames = frames;
    s.width = 64;
    s.height = 54;
    s.resolution = {{300, 48}, {12, 24}};
    return s;
}

}  // namespace

TEST(Gamma, EndpointsAndMidpoint) {
    EXPECT_EQ(gamma_encode(0.0), 0.0);
    EXPECT_EQ(gamma_encode(25.0), 1.0);
    EXPECT_NEAR(gamma_encode(12.5), std::pow(0.5, 0.66), 1e-15);
    EXPECT_NEAR(gamma_encode(12.5), 0.6329, 1e-4);
    EXPECT_THROW(gamma_encode(-0.1), std::invalid_argument);
    EXPECT_THROW(gamma_encode(25.5), std::invalid_argument);
    EXPECT_THROW(gamma_decode(1.5), std::invalid_argument);
}

TEST(Gamma, RoundTripRelativeError) {
    Rng rng(6);
    const auto d = oracle::random_image(40, 30, rng, 1e-3, 25.0);
    const auto back = invert_gamma(apply_gamma(d));
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(back[i] - d[i]) / d[i]);
    EXPECT_LT(worst, 1e-9);
}

TEST(Video, ThreeFramesWithManifest) {
    const auto dir = fresh_dir("video_l1");
    const auto m = generate_video(tiny(1, 9, 3), dir);
    ASSERT_EQ(m.frame_count(), 3u);
    for (const auto& f : m.frames) {
        EXPECT_TRUE(fs::exists(dir / f.rgb));
        EXPECT_TRUE(fs::exists(dir / f.depth));
        const auto depth = read_depth_png((dir / f.depth).string());
        EXPECT_EQ(depth.width(), 64u);
        EXPECT_EQ(depth.height(), 54u);
        for (std::size_t i = 0; i < depth.size(); ++i) {
            EXPECT_GE(depth[i], 0.0);
            EXPECT_LE(depth[i], 25.0);
        }
    }
    EXPECT_EQ(m.frames[0].rgb, "frame_000000_rgb.png");
    EXPECT_EQ(m.frames[2].depth, "frame_000002_depth.png");
    EXPECT_TRUE(fs::exists(dir / kManifestFileName));
    EXPECT_DOUBLE_EQ(m.duration_s() * m.fps, 3.0);
    for (std::size_t i = 1; i < m.frames.size(); ++i) {
        EXPECT_LT(m.frames[i].insertion_depth_cm, m.frames[i - 1].insertion_depth_cm);
    }
}

TEST(Video, ManifestJsonRoundTrip) {
    const auto dir = fresh_dir("video_json");
    const auto m = generate_video(tiny(5, 4, 4), dir);
    const auto back = read_manifest(dir / kManifestFileName);
    EXPECT_EQ(to_json(back).dump(), to_json(m).dump());
    const auto j = read_json_file(dir / kManifestFileName);
    EXPECT_EQ(j.at("depth_encoding").at("convention"), "planar_z");
    EXPECT_EQ(j.at("depth_encoding").at("gamma_applied"), false);
    EXPECT_DOUBLE_EQ(j.at("depth_encoding").at("scale_cm_per_code").get<double>(), 25.0 / 65535.0);
    EXPECT_EQ(j.at("level_config").at("texture"), true);
    // Texture seed is shared by frames 0-2 and changes at frame 3.
    EXPECT_EQ(m.frames[0].texture_seed, m.frames[2].texture_seed);
    EXPECT_NE(m.frames[2].texture_seed, m.frames[3].texture_seed);
}

TEST(Video, ByteIdenticalAcrossThreadCounts) {
    auto a = tiny(5, 21, 2), b = tiny(5, 21, 2);
    a.threads = 1;
    b.threads = 4;
    const auto da = fresh_dir("det_a"), db = fresh_dir("det_b");
    const auto ma = generate_video(a, da);
    generate_video(b, db);
    EXPECT_EQ(slurp(da / kManifestFileName), slurp(db / kManifestFileName));
    for (const auto& f : ma.frames) {
        EXPECT_EQ(slurp(da / f.rgb), slurp(db / f.rgb));
        EXPECT_EQ(slurp(da / f.depth), slurp(db / f.depth));
    }
}

TEST(Video, RejectsBadSpecs) {
    auto s = tiny(1, 1, 0);
    EXPECT_THROW(generate_video(s, fresh_dir("bad")), std::invalid_argument);
    s = tiny(6, 1, 1);
    EXPECT_THROW(generate_video(s, fresh_dir("bad")), std::invalid_argument);
    EXPECT_THROW(read_manifest(fresh_dir("nothing") / "manifest.json"), std::runtime_error);
}

TEST(Video, PresetDimensions) {
    const auto full = VideoSpec::full(5, 1);
    EXPECT_EQ(full.frames, 5400u);
    EXPECT_EQ(full.width, 1280u);
    EXPECT_EQ(full.height, 1080u);
    EXPECT_DOUBLE_EQ(static_cast<double>(full.frames) / full.fps, 360.0);
    const auto desk = VideoSpec::desk(5, 1);
    EXPECT_EQ(desk.frames, 60u);
    EXPECT_EQ(desk.width, 320u);
    EXPECT_EQ(desk.height, 270u);
}

TEST(Collection, FullPlanCounts) {
    const auto jobs = build_collection(CollectionPlan::full());
    EXPECT_EQ(jobs.size(), 47u);
    std::size_t frames = 0;
    std::array<std::size_t, 5> per_level{};
    for (const auto& j : jobs) {
        frames += j.spec.frames;
        ++per_level[static_cast<std::size_t>(j.level - 1)];
    }
    EXPECT_EQ(frames, 248400u);
    EXPECT_EQ(per_level, (std::array<std::size_t, 5>{5, 5, 5, 5, 27}));
    for (const auto& j : jobs) {
        EXPECT_GE(j.spec.frames, 5285u);
        EXPECT_LE(j.spec.frames, 5286u);
    }
    EXPECT_EQ(CollectionPlan::full().frame_count(), 248400u);
    std::set<std::uint64_t> seeds;
    for (const auto& j : jobs) seeds.insert(j.spec.seed);
    EXPECT_EQ(seeds.size(), jobs.size());
}

TEST(Collection, DeskPlanCounts) {
    const auto plan = CollectionPlan::desk();
    EXPECT_EQ(plan.frame_count(), 360u);
    EXPECT_EQ(build_collection(plan).size(), 6u);
    const auto parsed = plan_from_json({{"preset", "desk"}, {"frames", 10}});
    EXPECT_EQ(parsed.videos_per_level, plan.videos_per_level);
    EXPECT_EQ(parsed.frames, 10u);
    EXPECT_THROW(plan_from_json({{"preset", "huge"}}), std::invalid_argument);
    EXPECT_THROW(plan_from_json({{"videos_per_level", {1, 2}}}), std::invalid_argument);
}

TEST(Split, CurriculumFullCollection) {
    const auto a = split_collection(split_inputs(build_collection(CollectionPlan::full())), SplitStrategy::Curriculum);
    std::map<std::pair<int, std::string>, int> n;
    for (const auto& [id, tag] : a.tag) ++n[{id[1] - '0', tag}];
    for (int l = 1; l <= 4; ++l) {
        EXPECT_EQ((n[{l, "train"}]), 4);
        EXPECT_EQ((n[{l, "val"}]), 1);
        EXPECT_EQ((n[{l, "test"}]), 0);
    }
    EXPECT_EQ((n[{5, "train"}]), 15);
    EXPECT_EQ((n[{5, "val"}]), 4);
    EXPECT_EQ((n[{5, "test"}]), 8);
    EXPECT_TRUE(a.ids_with("unused").empty());
}

TEST(Split, TraditionalLeavesLowerLevelsUnused) {
    const auto jobs = build_collection(CollectionPlan::full());
    const auto tl = split_collection(split_inputs(jobs), SplitStrategy::Traditional);
    const auto cl = split_collection(split_inputs(jobs), SplitStrategy::Curriculum);
    EXPECT_EQ(tl.ids_with("unused").size(), 20u);
    EXPECT_EQ(tl.ids_with("train").size(), 15u);
    EXPECT_EQ(tl.ids_with("val").size(), 4u);
    EXPECT_EQ(tl.ids_with("test"), cl.ids_with("test"));
}

TEST(Split, PartitionIsExhaustiveAndDisjoint) {
    for (std::size_t n5 : {1, 2, 3, 7, 10, 27, 40}) {
        CollectionPlan p = CollectionPlan::desk();
        p.videos_per_level = {2, 3, 1, 4, n5};
        const auto jobs = build_collection(p);
        const auto a = split_collection(split_inputs(jobs), SplitStrategy::Curriculum);
        EXPECT_EQ(a.tag.size(), jobs.size());
        const auto sizes = apportion(n5, {0.55, 0.15, 0.30});
        EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], n5);
        for (std::size_t k = 0; k < 3; ++k) {
            const double target = std::array<double, 3>{0.55, 0.15, 0.30}[k] * static_cast<double>(n5);
            EXPECT_LT(std::abs(static_cast<double>(sizes[k]) - target), 1.0);
        }
    }
}

TEST(Split, InsufficientVideos) {
    EXPECT_THROW(split_collection({{"L5_v00", 5}}, SplitStrategy::Curriculum), std::invalid_argument);
    EXPECT_NO_THROW(split_collection({{"L5_v00", 5}}, SplitStrategy::Traditional));
    EXPECT_THROW(split_collection({{"L1_v00", 1}}, SplitStrategy::Traditional), std::invalid_argument);
    EXPECT_THROW(parse_split_strategy("xl"), std::invalid_argument);
}

TEST(Collection, RenderWritesIndexAndTags) {
    CollectionPlan p = CollectionPlan::desk(3);
    p.videos_per_level = {1, 0, 0, 0, 1};
    p.frames = 2;
    p.width = 32;
    p.height = 27;
    const auto dir = fresh_dir("collection");
    const auto ms = render_collection(p, dir);
    ASSERT_EQ(ms.size(), 2u);
    const auto index = read_json_file(dir / kCollectionIndexName);
    EXPECT_EQ(index.at("video_count"), 2);
    for (const auto& v : index.at("videos")) {
        const auto m = read_manifest(dir / v.at("manifest").get<std::string>());
        EXPECT_EQ(m.split.cl, v.at("split").at("cl").get<std::string>());
        EXPECT_EQ(m.split.tl, v.at("split").at("tl").get<std::string>());
        for (const auto& f : m.frames) EXPECT_TRUE(fs::exists(dir / m.video_id / f.depth));
        EXPECT_EQ(m.split.cl, "unassigned");  // no Level 2-4 videos
    }
    EXPECT_EQ(index.at("videos")[1].at("split").at("tl"), "train");  // a single Level-5 video trains
}
