#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "colonsynth/core/vec3.hpp"
#include "colonsynth/dataset/gamma.hpp"
#include "colonsynth/dataset/level.hpp"
#include "colonsynth/scene/camera.hpp"

namespace colonsynth {

inline constexpr const char* kVideoManifestSchema = "colonsynth.video/1";
inline constexpr const char* kManifestFileName = "manifest.json";
inline constexpr double kDefaultFps = 15.0;

struct FrameRecord {
    std::size_t index = 0;
    std::string rgb;    // file name relative to the manifest
    std::string depth;
    CameraPose pose;
    double arclength_cm = 0.0;        // centerline parameter, 0 at the caecum
    double insertion_depth_cm = 0.0;  // remaining centerline length to the anus
    std::uint64_t texture_seed = 0;
};

struct PolypRecord {
    double diameter_mm = 0.0;
    double axial_cm = 0.0;
    double max_radial_perturbation = 0.0;
    int redraws = 0;
};

/// Summary of the colon model a video was rendered from.
struct ModelSummary {
    double centerline_length_cm = 0.0;
    std::vector<std::pair<std::string, double>> segment_lengths_cm;
    double hepatic_flexure_deg = 0.0;
    double splenic_flexure_deg = 0.0;
    std::vector<double> fold_positions_cm;
    std::vector<double> fold_diameters_cm;
    std::vector<PolypRecord> polyps;
    std::size_t triangles = 0;
    std::vector<std::string> warnings;
};

struct SplitTags {
    std::string cl = "unassigned";
    std::string tl = "unassigned";
};

struct VideoManifest {
    std::string video_id;
    int level = 1;
    std::uint64_t seed = 0;
    double fps = kDefaultFps;
    Intrinsics intrinsics;
    GammaSpec gamma;
    double exposure = 1.0;
    double light_power = 1.0;
    bool supersample = false;
    std::size_t camera_fallbacks = 0;
    ModelSummary model;
    std::vector<FrameRecord> frames;
    SplitTags split;

    std::size_t frame_count() const { return frames.size(); }
    double duration_s() const { return static_cast<double>(frames.size()) / fps; }
};

namespace detail {

inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

inline Vec3 json_vec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

inline nlohmann::json level_json(const LevelConfig& c) {
    return {{"level", c.level},
            {"folds", c.folds},
            {"deformed_lumen", c.deformed_lumen},
            {"surface_irregularities", c.surface_irregularities},
            {"specular", c.specular},
            {"texture", c.texture},
            {"polyp_variant", std::string(to_string(c.polyp_variant))}};
}

}  // namespace detail

inline nlohmann::json to_json(const VideoManifest& m) {
    using nlohmann::json;
    const Intrinsics& k = m.intrinsics;
    json frames = json::array();
    for (const auto& f : m.frames) {
        frames.push_back({{"index", f.index},
                          {"rgb", f.rgb},
                          {"depth", f.depth},
                          {"position_cm", detail::vec_json(f.pose.position)},
                          {"optical_axis", detail::vec_json(f.pose.optical_axis)},
                          {"up", detail::vec_json(f.pose.up)},
                          {"arclength_cm", f.arclength_cm},
                          {"insertion_depth_cm", f.insertion_depth_cm},
                          {"texture_seed", f.texture_seed}});
    }
    json segments = json::array();
    for (const auto& [name, len] : m.model.segment_lengths_cm) segments.push_back({{"name", name}, {"length_cm", len}});
    json polyps = json::array();
    for (const auto& p : m.model.polyps) {
        polyps.push_back({{"diameter_mm", p.diameter_mm},
                          {"axial_cm", p.axial_cm},
                          {"max_radial_perturbation", p.max_radial_perturbation},
                          {"redraws", p.redraws}});
    }
    return {
        {"schema", kVideoManifestSchema},
        {"video_id", m.video_id},
        {"level", m.level},
        {"seed", m.seed},
        {"frame_count", m.frame_count()},
        {"fps", m.fps},
        {"duration_s", m.duration_s()},
        {"resolution", {{"width", k.width}, {"height", k.height}}},
        {"intrinsics",
         {{"focal_px", k.focal_px},
          {"focal_cm", k.focal_cm},
          {"cx", k.cx},
          {"cy", k.cy},
          {"horizontal_fov_deg", k.horizontal_fov_deg},
          {"pixel_convention", "u = col - width/2, v = row - height/2; x right, y down, z forward"}}},
        {"depth_encoding",
         {{"convention", "planar_z"},
          {"format", "png16"},
          {"units", "cm"},
          {"d_max_cm", m.gamma.d_max},
          {"scale_cm_per_code", m.gamma.d_max / 65535.0},
          {"miss_value_cm", m.gamma.d_max},
          {"gamma", m.gamma.gamma},
          {"gamma_applied", false}}},
        {"rgb_encoding", {{"format", "png8"}, {"transfer", "srgb"}, {"exposure", m.exposure}}},
        {"light",
         {{"position", "camera"},
          {"power", m.light_power},
          {"cone_half_angle_deg", LightSource{}.cone_half_angle_deg},
          {"falloff_start_deg", LightSource{}.falloff_start_deg}}},
        {"render", {{"supersample", m.supersample}, {"camera_fallbacks", m.camera_fallbacks}}},
        {"level_config", detail::level_json(level_config(m.level))},
        {"model",
         {{"centerline_length_cm", m.model.centerline_length_cm},
          {"segments", segments},
          {"hepatic_flexure_deg", m.model.hepatic_flexure_deg},
          {"splenic_flexure_deg", m.model.splenic_flexure_deg},
          {"fold_count", m.model.fold_positions_cm.size()},
          {"fold_positions_cm", m.model.fold_positions_cm},
          {"fold_diameters_cm", m.model.fold_diameters_cm},
          {"polyp_count", m.model.polyps.size()},
          {"polyps", polyps},
          {"triangles", m.model.triangles},
          {"warnings", m.model.warnings}}},
        {"split", {{"cl", m.split.cl}, {"tl", m.split.tl}}},
        {"frames", frames},
    };
}

inline VideoManifest manifest_from_json(const nlohmann::json& j) {
    if (j.value("schema", std::string()) != kVideoManifestSchema) {
        throw std::runtime_error("manifest: unsupported schema '" + j.value("schema", std::string()) + "'");
    }
    VideoManifest m;
    m.video_id = j.at("video_id").get<std::string>();
    m.level = j.at("level").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.fps = j.at("fps").get<double>();
    const auto& k = j.at("intrinsics");
    m.intrinsics.width = j.at("resolution").at("width").get<std::size_t>();
    m.intrinsics.height = j.at("resolution").at("height").get<std::size_t>();
    m.intrinsics.focal_px = k.at("focal_px").get<double>();
    m.intrinsics.focal_cm = k.at("focal_cm").get<double>();
    m.intrinsics.cx = k.at("cx").get<double>();
    m.intrinsics.cy = k.at("cy").get<double>();
    m.intrinsics.horizontal_fov_deg = k.at("horizontal_fov_deg").get<double>();
    const auto& de = j.at("depth_encoding");
    m.gamma.d_max = de.at("d_max_cm").get<double>();
    m.gamma.gamma = de.at("gamma").get<double>();
    m.exposure = j.at("rgb_encoding").at("exposure").get<double>();
    m.light_power = j.at("light").at("power").get<double>();
    m.supersample = j.at("render").at("supersample").get<bool>();
    m.camera_fallbacks = j.at("render").at("camera_fallbacks").get<std::size_t>();
    const auto& md = j.at("model");
    m.model.centerline_length_cm = md.at("centerline_length_cm").get<double>();
    for (const auto& s : md.at("segments")) {
        m.model.segment_lengths_cm.emplace_back(s.at("name").get<std::string>(), s.at("length_cm").get<double>());
    }
    m.model.hepatic_flexure_deg = md.at("hepatic_flexure_deg").get<double>();
    m.model.splenic_flexure_deg = md.at("splenic_flexure_deg").get<double>();
    m.model.fold_positions_cm = md.at("fold_positions_cm").get<std::vector<double>>();
    m.model.fold_diameters_cm = md.at("fold_diameters_cm").get<std::vector<double>>();
    for (const auto& p : md.at("polyps")) {
        m.model.polyps.push_back({p.at("diameter_mm").get<double>(), p.at("axial_cm").get<double>(),
                                  p.at("max_radial_perturbation").get<double>(), p.at("redraws").get<int>()});
    }
    m.model.triangles = md.at("triangles").get<std::size_t>();
    m.model.warnings = md.at("warnings").get<std::vector<std::string>>();
    m.split.cl = j.at("split").at("cl").get<std::string>();
    m.split.tl = j.at("split").at("tl").get<std::string>();
    for (const auto& f : j.at("frames")) {
        FrameRecord r;
        r.index = f.at("index").get<std::size_t>();
        r.rgb = f.at("rgb").get<std::string>();
        r.depth = f.at("depth").get<std::string>();
        r.pose = {detail::json_vec(f.at("position_cm")), detail::json_vec(f.at("optical_axis")), detail::json_vec(f.at("up"))};
        r.arclength_cm = f.at("arclength_cm").get<double>();
        r.insertion_depth_cm = f.at("insertion_depth_cm").get<double>();
        r.texture_seed = f.at("texture_seed").get<std::uint64_t>();
        m.frames.push_back(std::move(r));
    }
    if (j.at("frame_count").get<std::size_t>() != m.frames.size()) {
        throw std::runtime_error("manifest: frame_count does not match the frame list");
    }
    return m;
}

/// Intrinsics from either a video manifest or a bare camera object
/// {"width", "height", "focal_px"} (or "horizontal_fov_deg" instead of
/// "focal_px").
inline Intrinsics intrinsics_from_json(const nlohmann::json& j) {
    if (j.contains("schema")) return manifest_from_json(j).intrinsics;
    const auto w = j.at("width").get<std::size_t>();
    const auto h = j.at("height").get<std::size_t>();
    Intrinsics k = Intrinsics::for_image(w, h, j.value("horizontal_fov_deg", kHorizontalFovDeg));
    if (j.contains("focal_px")) k.focal_px = j.at("focal_px").get<double>();
    if (!(k.focal_px > 0.0)) throw std::invalid_argument("intrinsics: focal_px must be positive");
    return k;
}

inline nlohmann::json intrinsics_to_json(const Intrinsics& k) {
    return {{"width", k.width}, {"height", k.height}, {"focal_px", k.focal_px}, {"horizontal_fov_deg", k.horizontal_fov_deg}};
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

inline void write_manifest(const std::filesystem::path& path, const VideoManifest& m) { write_json_file(path, to_json(m)); }

inline VideoManifest read_manifest(const std::filesystem::path& path) {
    try {
        return manifest_from_json(read_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
    }
}

}  // namespace colonsynth
