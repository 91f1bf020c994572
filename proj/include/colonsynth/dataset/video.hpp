#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/dataset/manifest.hpp"
#include "colonsynth/geometry/colon_model.hpp"
#include "colonsynth/render/bvh.hpp"
#include "colonsynth/render/png_io.hpp"
#include "colonsynth/render/renderer.hpp"
#include "colonsynth/scene/camera.hpp"
#include "colonsynth/scene/materials.hpp"

namespace colonsynth {

/// One video: a full withdrawal through one seeded colon.
struct VideoSpec {
    int level = 1;
    std::uint64_t seed = 0;
    std::size_t frames = 5400;   // 6 minutes at 15 fps
    std::size_t width = 1280;
    std::size_t height = 1080;
    double fps = kDefaultFps;
    bool supersample = false;
    unsigned threads = 0;
    std::string video_id;        // defaults to "L<level>_s<seed>"
    ModelResolution resolution{};

    static VideoSpec full(int level, std::uint64_t seed) {
        VideoSpec s;
        s.level = level;
        s.seed = seed;
        return s;
    }

    /// Laptop-sized preset: 320x270, 60 frames.
    static VideoSpec desk(int level, std::uint64_t seed) {
        VideoSpec s = full(level, seed);
        s.frames = 60;
        s.width = 320;
        s.height = 270;
        return s;
    }

    void validate() const {
        level_config(level);
        if (frames < 1) throw std::invalid_argument("VideoSpec: frames must be >= 1");
        if (width < 2 || height < 2) throw std::invalid_argument("VideoSpec: resolution must be at least 2x2");
        if (!(fps > 0.0)) throw std::invalid_argument("VideoSpec: fps must be positive");
    }

    std::string id() const { return video_id.empty() ? "L" + std::to_string(level) + "_s" + std::to_string(seed) : video_id; }
};

inline std::string frame_file_name(std::size_t index, const char* kind) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%06zu_%s.png", index, kind);
    return buf;
}

/// Seeds of the independent draws of one video.
inline std::uint64_t camera_seed(std::uint64_t video_seed) { return derive_seed(video_seed, 6); }

inline ModelSummary summarize_model(const ColonModel& model) {
    ModelSummary s;
    s.centerline_length_cm = model.centerline.length();
    for (std::size_t i = 0; i < model.centerline.segments.size(); ++i) {
        s.segment_lengths_cm.emplace_back(std::string(to_string(model.centerline.segments[i].name)),
                                          model.centerline.segment_start[i + 1] - model.centerline.segment_start[i]);
    }
    s.hepatic_flexure_deg = model.centerline.hepatic_flexure_deg();
    s.splenic_flexure_deg = model.centerline.splenic_flexure_deg();
    s.fold_positions_cm = model.folds.axial_positions;
    s.fold_diameters_cm = model.folds.diameters;
    for (const auto& p : model.polyps) {
        s.polyps.push_back({p.spec.base_diameter_mm, p.spec.axial_cm, p.spec.max_radial_perturbation, p.redraws});
    }
    s.triangles = model.mesh.triangle_count();
    s.warnings = model.warnings;
    return s;
}

/// Renders `spec.frames` RGB/depth pairs into `out_dir` and writes
/// manifest.json after every frame is on disk. Exposure is fixed per video
/// from the first frame. Output bytes depend only on the spec, never on the
/// thread count. `progress(i)` is called after frame i is written.
inline VideoManifest generate_video(const VideoSpec& spec, const std::filesystem::path& out_dir,
                                    const std::function<void(std::size_t)>& progress = {}) {
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("generate_video: cannot create " + out_dir.string() + ": " + ec.message());

    const LevelConfig level = level_config(spec.level);
    const ColonModel model = build_colon_model(spec.seed, level, spec.resolution);
    const Bvh bvh(model.mesh);
    const CameraPath path =
        generate_camera_path(model.centerline.curve, bvh, std::max<std::size_t>(spec.frames, 2), camera_seed(spec.seed));
    const Intrinsics K = Intrinsics::for_image(spec.width, spec.height);
    RenderSettings settings;
    settings.supersample = spec.supersample;
    settings.threads = spec.threads;

    VideoManifest m;
    m.video_id = spec.id();
    m.level = spec.level;
    m.seed = spec.seed;
    m.fps = spec.fps;
    m.intrinsics = K;
    m.supersample = spec.supersample;
    m.camera_fallbacks = path.fallbacks;
    m.model = summarize_model(model);

    const double L = model.centerline.length();
    for (std::size_t i = 0; i < spec.frames; ++i) {
        const CameraPose& pose = path.poses[i];
        const LightSource light = LightSource::at_camera(pose, m.light_power);
        const MaterialTable materials = assign_materials(level, i, spec.seed);
        LinearFrame lin = render_linear(bvh, materials, pose, K, light, settings);
        if (i == 0) m.exposure = auto_exposure(lin.radiance);

        FrameRecord r;
        r.index = i;
        r.rgb = frame_file_name(i, "rgb");
        r.depth = frame_file_name(i, "depth");
        r.pose = pose;
        r.arclength_cm = path.arclength[i];
        r.insertion_depth_cm = L - path.arclength[i];
        r.texture_seed = materials.texture_seed;
        write_png_rgb8((out_dir / r.rgb).string(), tone_map(lin.radiance, m.exposure));
        write_depth_png((out_dir / r.depth).string(), lin.depth, m.gamma.d_max);
        m.frames.push_back(std::move(r));
        if (progress) progress(i);
    }
    write_manifest(out_dir / kManifestFileName, m);
    return m;
}

}  // namespace colonsynth
