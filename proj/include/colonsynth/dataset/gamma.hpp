#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "colonsynth/core/image.hpp"

namespace colonsynth {

/// Depth gamma used by training consumers: e = (d / d_max)^gamma in [0, 1].
/// Files on disk always hold linear depth; this is applied on load.
struct GammaSpec {
    double gamma = 0.66;
    double d_max = 25.0;  // cm

    void validate() const {
        if (!(gamma > 0.0)) throw std::invalid_argument("GammaSpec: gamma must be positive");
        if (!(d_max > 0.0)) throw std::invalid_argument("GammaSpec: d_max must be positive");
    }
};

inline double gamma_encode(double depth_cm, const GammaSpec& g = {}) {
    if (!(depth_cm >= 0.0) || depth_cm > g.d_max) {
        throw std::invalid_argument("gamma_encode: depth " + std::to_string(depth_cm) + " outside [0, " +
                                    std::to_string(g.d_max) + "]");
    }
    return std::pow(depth_cm / g.d_max, g.gamma);
}

inline double gamma_decode(double encoded, const GammaSpec& g = {}) {
    if (!(encoded >= 0.0) || encoded > 1.0) {
        throw std::invalid_argument("gamma_decode: value " + std::to_string(encoded) + " outside [0, 1]");
    }
    return g.d_max * std::pow(encoded, 1.0 / g.gamma);
}

inline ImageD apply_gamma(const ImageD& depth_cm, const GammaSpec& g = {}) {
    g.validate();
    ImageD out(depth_cm.width(), depth_cm.height());
    for (std::size_t i = 0; i < depth_cm.size(); ++i) out[i] = gamma_encode(depth_cm[i], g);
    return out;
}

inline ImageD invert_gamma(const ImageD& encoded, const GammaSpec& g = {}) {
    g.validate();
    ImageD out(encoded.width(), encoded.height());
    for (std::size_t i = 0; i < encoded.size(); ++i) out[i] = gamma_decode(encoded[i], g);
    return out;
}

}  // namespace colonsynth
