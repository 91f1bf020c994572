#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/dataset/level.hpp"
#include "colonsynth/dataset/manifest.hpp"
#include "colonsynth/dataset/video.hpp"

namespace colonsynth {

inline constexpr const char* kCollectionSchema = "colonsynth.collection/1";
inline constexpr const char* kCollectionIndexName = "collection.json";

inline constexpr std::size_t kFullCollectionFrames = 248400;

/// How many videos to render per level, and at what size. When
/// `total_frames` is non-zero it is spread over the videos as evenly as
/// possible (earlier videos take the remainder); otherwise every video has
/// `frames` frames.
struct CollectionPlan {
    std::array<std::size_t, kLevelCount> videos_per_level{5, 5, 5, 5, 27};
    std::size_t frames = 5400;
    std::size_t total_frames = kFullCollectionFrames;
    std::size_t width = 1280;
    std::size_t height = 1080;
    std::uint64_t seed = 0;

    static CollectionPlan full(std::uint64_t seed = 0) {
        CollectionPlan p;
        p.seed = seed;
        return p;
    }

    /// 1, 1, 1, 1, 2 videos of 60 frames at 320x270.
    static CollectionPlan desk(std::uint64_t seed = 0) {
        CollectionPlan p;
        p.videos_per_level = {1, 1, 1, 1, 2};
        p.frames = 60;
        p.total_frames = 0;
        p.width = 320;
        p.height = 270;
        p.seed = seed;
        return p;
    }

    std::size_t video_count() const { return std::accumulate(videos_per_level.begin(), videos_per_level.end(), std::size_t{0}); }
    std::size_t frames_for(std::size_t ordinal) const {
        if (total_frames == 0) return frames;
        const std::size_t n = video_count();
        return total_frames / n + (ordinal < total_frames % n ? 1 : 0);
    }
    std::size_t frame_count() const { return total_frames != 0 ? total_frames : video_count() * frames; }
};

/// Plan file: {"preset": "full"|"desk"} and/or explicit
/// {"videos_per_level": [5 counts], "frames", "total_frames", "width",
/// "height", "seed"}. Giving "frames" without "total_frames" disables the
/// frame budget.
inline CollectionPlan plan_from_json(const nlohmann::json& j) {
    CollectionPlan p;
    const std::string preset = j.value("preset", std::string("full"));
    if (preset == "desk") {
        p = CollectionPlan::desk();
    } else if (preset != "full") {
        throw std::invalid_argument("collection plan: unknown preset '" + preset + "'");
    }
    if (j.contains("videos_per_level")) {
        const auto v = j.at("videos_per_level").get<std::vector<std::size_t>>();
        if (v.size() != kLevelCount) throw std::invalid_argument("collection plan: videos_per_level needs 5 entries");
        std::copy(v.begin(), v.end(), p.videos_per_level.begin());
    }
    if (j.contains("frames")) {
        p.frames = j.at("frames").get<std::size_t>();
        p.total_frames = 0;
    }
    p.total_frames = j.value("total_frames", p.total_frames);
    p.width = j.value("width", p.width);
    p.height = j.value("height", p.height);
    p.seed = j.value("seed", p.seed);
    if (p.frames < 1) throw std::invalid_argument("collection plan: frames must be >= 1");
    if (p.total_frames != 0 && p.total_frames < p.video_count()) {
        throw std::invalid_argument("collection plan: total_frames must give every video at least one frame");
    }
    return p;
}

inline nlohmann::json plan_to_json(const CollectionPlan& p) {
    return {{"videos_per_level", p.videos_per_level}, {"frames", p.frames},
            {"total_frames", p.total_frames}, {"width", p.width},
            {"height", p.height}, {"seed", p.seed}};
}

/// One planned video of a collection.
struct VideoJob {
    std::string video_id;  // "L<level>_v<index>"
    int level = 1;
    std::size_t index = 0;  // within its level
    VideoSpec spec;
};

/// Expands a plan into per-video jobs: every video gets its own colon seed.
inline std::vector<VideoJob> build_collection(const CollectionPlan& plan) {
    if (plan.video_count() == 0) throw std::invalid_argument("build_collection: plan has no videos");
    std::vector<VideoJob> jobs;
    for (int level = 1; level <= kLevelCount; ++level) {
        for (std::size_t i = 0; i < plan.videos_per_level[static_cast<std::size_t>(level - 1)]; ++i) {
            VideoJob job;
            char id[32];
            std::snprintf(id, sizeof(id), "L%d_v%02zu", level, i);
            job.video_id = id;
            job.level = level;
            job.index = i;
            job.spec.level = level;
            job.spec.seed = derive_seed(plan.seed, static_cast<std::uint64_t>(level) * 1000 + i);
            job.spec.frames = plan.frames_for(jobs.size());
            job.spec.width = plan.width;
            job.spec.height = plan.height;
            job.spec.video_id = job.video_id;
            jobs.push_back(job);
        }
    }
    return jobs;
}

enum class SplitStrategy { Curriculum, Traditional };

inline SplitStrategy parse_split_strategy(const std::string& s) {
    if (s == "cl") return SplitStrategy::Curriculum;
    if (s == "tl") return SplitStrategy::Traditional;
    throw std::invalid_argument("unknown split strategy '" + s + "' (expected cl or tl)");
}

/// Train/val/test fractions per level for a strategy. Levels 1-4 use 80/20
/// train/val under curriculum learning and are unused under traditional
/// learning; Level 5 uses 55/15/30 under both, so both share one test set.
inline std::array<double, 3> split_fractions(SplitStrategy s, int level) {
    if (level == kLevelCount) return {0.55, 0.15, 0.30};
    if (s == SplitStrategy::Traditional) return {0.0, 0.0, 0.0};
    return {0.8, 0.2, 0.0};
}

/// Largest-remainder apportionment of n items; ties go to the earlier part.
inline std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fractions) {
    std::array<std::size_t, 3> out{};
    std::array<double, 3> rem{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = fractions[i] * static_cast<double>(n);
        out[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rem[i] = exact - static_cast<double>(out[i]);
        used += out[i];
    }
    const double total = fractions[0] + fractions[1] + fractions[2];
    if (total == 0.0) return {0, 0, 0};
    while (used < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i) {
            if (rem[i] > rem[best] + 1e-12) best = i;
        }
        ++out[best];
        rem[best] = -1.0;
        ++used;
    }
    return out;
}

struct SplitAssignment {
    SplitStrategy strategy = SplitStrategy::Curriculum;
    std::map<std::string, std::string> tag;  // video id -> train | val | test | unused

    std::vector<std::string> ids_with(const std::string& t) const {
        std::vector<std::string> ids;
        for (const auto& [id, v] : tag) {
            if (v == t) ids.push_back(id);
        }
        return ids;
    }
};

struct SplitInput {
    std::string video_id;
    int level = 1;
};

/// Partitions videos by level, in the given order: the first videos of a
/// level train, the next validate, the rest test.
inline SplitAssignment split_collection(const std::vector<SplitInput>& videos, SplitStrategy strategy) {
    SplitAssignment a;
    a.strategy = strategy;
    std::array<std::vector<std::string>, kLevelCount> by_level;
    for (const auto& v : videos) {
        if (v.level < 1 || v.level > kLevelCount) throw std::invalid_argument("split_collection: invalid level");
        if (a.tag.count(v.video_id)) throw std::invalid_argument("split_collection: duplicate video id " + v.video_id);
        a.tag[v.video_id] = "unused";
        by_level[static_cast<std::size_t>(v.level - 1)].push_back(v.video_id);
    }
    static const char* kNames[3] = {"train", "val", "test"};
    for (int level = 1; level <= kLevelCount; ++level) {
        const auto& ids = by_level[static_cast<std::size_t>(level - 1)];
        const auto fr = split_fractions(strategy, level);
        if (fr[0] == 0.0) continue;
        if (ids.empty()) {
            throw std::invalid_argument("split_collection: strategy needs Level " + std::to_string(level) +
                                        " videos but none were given");
        }
        const auto parts = apportion(ids.size(), fr);
        std::size_t k = 0;
        for (std::size_t part = 0; part < 3; ++part) {
            for (std::size_t c = 0; c < parts[part]; ++c) a.tag[ids[k++]] = kNames[part];
        }
    }
    return a;
}

inline std::vector<SplitInput> split_inputs(const std::vector<VideoJob>& jobs) {
    std::vector<SplitInput> v;
    for (const auto& j : jobs) v.push_back({j.video_id, j.level});
    return v;
}

inline nlohmann::json split_to_json(const SplitAssignment& a) {
    return {{"strategy", a.strategy == SplitStrategy::Curriculum ? "cl" : "tl"},
            {"train", a.ids_with("train")},
            {"val", a.ids_with("val")},
            {"test", a.ids_with("test")},
            {"unused", a.ids_with("unused")}};
}

/// Split tags for a rendered collection; a strategy the plan cannot satisfy
/// (e.g. no Level 5 videos) leaves every tag "unassigned".
inline std::map<std::string, std::string> collection_tags(const std::vector<VideoJob>& jobs, SplitStrategy s) {
    try {
        return split_collection(split_inputs(jobs), s).tag;
    } catch (const std::invalid_argument&) {
        std::map<std::string, std::string> none;
        for (const auto& j : jobs) none[j.video_id] = "unassigned";
        return none;
    }
}

/// Collection index listing every video and both split tags.
inline nlohmann::json collection_index(const CollectionPlan& plan, const std::vector<VideoJob>& jobs) {
    const auto cl = collection_tags(jobs, SplitStrategy::Curriculum);
    const auto tl = collection_tags(jobs, SplitStrategy::Traditional);
    nlohmann::json videos = nlohmann::json::array();
    for (const auto& j : jobs) {
        videos.push_back({{"video_id", j.video_id},
                          {"level", j.level},
                          {"seed", j.spec.seed},
                          {"frames", j.spec.frames},
                          {"manifest", j.video_id + "/" + kManifestFileName},
                          {"split", {{"cl", cl.at(j.video_id)}, {"tl", tl.at(j.video_id)}}}});
    }
    return {{"schema", kCollectionSchema},
            {"plan", plan_to_json(plan)},
            {"video_count", jobs.size()},
            {"frame_count", plan.frame_count()},
            {"videos", videos}};
}

inline std::vector<SplitInput> split_inputs(const nlohmann::json& index) {
    if (index.value("schema", std::string()) != kCollectionSchema) {
        throw std::runtime_error("collection index: unsupported schema");
    }
    std::vector<SplitInput> v;
    for (const auto& e : index.at("videos")) v.push_back({e.at("video_id").get<std::string>(), e.at("level").get<int>()});
    return v;
}

/// Renders every job into `out_dir/<video_id>/` (videos in sequence, frames
/// parallel inside), stamps split tags into each manifest and writes the
/// collection index last. Returns the manifests.
inline std::vector<VideoManifest> render_collection(const CollectionPlan& plan, const std::filesystem::path& out_dir,
                                                    unsigned threads = 0) {
    const auto jobs = build_collection(plan);
    const auto cl = collection_tags(jobs, SplitStrategy::Curriculum);
    const auto tl = collection_tags(jobs, SplitStrategy::Traditional);
    std::vector<VideoManifest> manifests;
    for (const auto& job : jobs) {
        VideoSpec spec = job.spec;
        spec.threads = threads;
        const auto dir = out_dir / job.video_id;
        VideoManifest m = generate_video(spec, dir);
        m.split = {cl.at(job.video_id), tl.at(job.video_id)};
        write_manifest(dir / kManifestFileName, m);
        manifests.push_back(std::move(m));
    }
    write_json_file(out_dir / kCollectionIndexName, collection_index(plan, jobs));
    return manifests;
}

}  // namespace colonsynth
