#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace colonsynth {

enum class PolypVariant { Sphere, Deformed };

inline std::string_view to_string(PolypVariant v) { return v == PolypVariant::Sphere ? "sphere" : "deformed"; }

/// Feature switches of one curriculum level.
struct LevelConfig {
    int level = 1;
    bool folds = false;
    bool deformed_lumen = false;
    bool surface_irregularities = false;
    bool specular = false;
    bool texture = false;
    PolypVariant polyp_variant = PolypVariant::Sphere;

    friend bool operator==(const LevelConfig&, const LevelConfig&) = default;
};

inline constexpr int kLevelCount = 5;

/// Level 1: basic bent tube with spherical polyps. Level 2 adds haustral
/// folds; Level 3 segment-specific lumen shapes and deformed polyps; Level 4
/// surface irregularities and specular reflections; Level 5 tissue texture.
inline LevelConfig level_config(int level) {
    if (level < 1 || level > kLevelCount) {
        throw std::invalid_argument("level_config: level must be in 1..5, got " + std::to_string(level));
    }
    LevelConfig c;
    c.level = level;
    c.folds = level >= 2;
    c.deformed_lumen = level >= 3;
    c.polyp_variant = level >= 3 ? PolypVariant::Deformed : PolypVariant::Sphere;
    c.surface_irregularities = level >= 4;
    c.specular = level >= 4;
    c.texture = level >= 5;
    return c;
}

}  // namespace colonsynth
