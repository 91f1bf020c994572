#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colonsynth/core/rng.hpp"
#include "colonsynth/dataset/level.hpp"
#include "colonsynth/geometry/centerline.hpp"
#include "colonsynth/geometry/folds.hpp"
#include "colonsynth/geometry/polyp.hpp"
#include "colonsynth/geometry/profile.hpp"
#include "colonsynth/geometry/tube.hpp"
#include "colonsynth/scene/surface.hpp"

namespace colonsynth {

struct ModelResolution {
    TubeResolution tube{};
    PolypResolution polyp{};
};

/// A complete seeded colon: centerline, lumen profile, folds, polyps and the
/// final triangle mesh, in cm.
struct ColonModel {
    std::uint64_t seed = 0;
    LevelConfig level;
    ColonCenterline centerline;
    LumenProfile profile;
    DeformedLumenParams lumen;
    FoldSpec folds;
    std::vector<AttachedPolyp> polyps;
    NoiseParams noise;
    TriMesh mesh;
    std::vector<std::string> warnings;
};

/// Builds the colon for a curriculum level. Sub-seeds are derived per stage so
/// changing one feature switch leaves the other draws untouched.
inline ColonModel build_colon_model(std::uint64_t seed, const LevelConfig& level, const ModelResolution& res = {},
                                    const std::vector<SegmentSpec>& segments = default_segments()) {
    ColonModel m;
    m.seed = seed;
    m.level = level;
    m.centerline = build_centerline(segments, derive_seed(seed, 1));
    const double L = m.centerline.length();

    if (level.deformed_lumen) {
        Rng rng(derive_seed(seed, 2));
        m.lumen.oval_eccentricity = rng.uniform(0.6, 0.85);
        m.lumen.orientation = rng.uniform(0.0, 2.0 * kPi);
        m.profile = deformed_profile(m.centerline, m.lumen);
    } else {
        m.profile = circular_profile(m.centerline);
    }
    m.mesh = extrude_tube(m.centerline.curve, m.profile, res.tube.axial_steps, res.tube.radial_steps);

    if (level.folds) {
        const auto& prof = m.profile;
        m.folds = draw_folds(L, derive_seed(seed, 3), [&](double s) { return 2.0 * prof.equal_area_radius(s); });
        m.mesh = apply_folds(m.mesh, m.folds, m.centerline.curve, &m.warnings);
    }

    PolypDrawParams pp;
    pp.deformed = level.polyp_variant == PolypVariant::Deformed;
    const auto specs = draw_polyps(L, derive_seed(seed, 4), pp);
    m.mesh = attach_polyps(m.mesh, specs, m.centerline.curve, {}, &m.polyps, res.polyp);

    if (level.surface_irregularities) {
        m.noise.seed = derive_seed(seed, 5);
        m.mesh = displace_surface(m.mesh, m.noise);
    } else {
        m.noise.amplitude = 0.0;
    }
    return m;
}

inline ColonModel build_colon_model(std::uint64_t seed, int level, const ModelResolution& res = {}) {
    return build_colon_model(seed, level_config(level), res);
}

}  // namespace colonsynth
