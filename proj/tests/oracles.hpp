#pragma once

// Deliberately naive reference computations. They share no code paths with
// the library beyond the image container and kernel taps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "colonsynth/core/image.hpp"
#include "colonsynth/core/rng.hpp"
#include "colonsynth/loss/kernels.hpp"

namespace colonsynth::oracle {

inline double at_clamped(const ImageD& f, long x, long y) {
    x = std::clamp<long>(x, 0, static_cast<long>(f.width()) - 1);
    y = std::clamp<long>(y, 0, static_cast<long>(f.height()) - 1);
    return f(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
}

inline ImageD random_image(std::size_t w, std::size_t h, Rng& rng, double lo = 0.5, double hi = 20.0) {
    ImageD img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform(lo, hi);
    return img;
}

inline double loss_z(const ImageD& d, const ImageD& p) {
    double acc = 0.0;
    for (std::size_t y = 0; y < d.height(); ++y)
        for (std::size_t x = 0; x < d.width(); ++x) acc += std::abs(d(x, y) - p(x, y));
    return acc / static_cast<double>(d.size());
}

inline double loss_e(const ImageD& d, const ImageD& p) {
    double acc = 0.0;
    for (long y = 0; y < static_cast<long>(d.height()); ++y) {
        for (long x = 0; x < static_cast<long>(d.width()); ++x) {
            const double gxd = 0.5 * (at_clamped(d, x + 1, y) - at_clamped(d, x - 1, y));
            const double gxp = 0.5 * (at_clamped(p, x + 1, y) - at_clamped(p, x - 1, y));
            const double gyd = 0.5 * (at_clamped(d, x, y + 1) - at_clamped(d, x, y - 1));
            const double gyp = 0.5 * (at_clamped(p, x, y + 1) - at_clamped(p, x, y - 1));
            acc += std::abs(gxd - gxp) + std::abs(gyd - gyp);
        }
    }
    return acc / static_cast<double>(d.size());
}

/// Direct 2-D correlation with a dense side x side kernel (row-major [ky][kx]).
inline double correlate_at(const ImageD& f, const std::vector<double>& k, std::size_t side, long origin, long x,
                           long y) {
    double acc = 0.0;
    for (long b = 0; b < static_cast<long>(side); ++b)
        for (long a = 0; a < static_cast<long>(side); ++a)
            acc += k[static_cast<std::size_t>(b) * side + static_cast<std::size_t>(a)] *
                   at_clamped(f, x + a - origin, y + b - origin);
    return acc;
}

inline double loss_c(const ImageD& d, const ImageD& p, const GaussianKernels& k) {
    const HessianKernels2D h = hessian_kernels_2d(k);
    const long o = k.smooth.origin;
    double acc = 0.0;
    for (long y = 0; y < static_cast<long>(d.height()); ++y) {
        for (long x = 0; x < static_cast<long>(d.width()); ++x) {
            const double xx = correlate_at(d, h.xx, h.side, o, x, y) - correlate_at(p, h.xx, h.side, o, x, y);
            const double xy = correlate_at(d, h.xy, h.side, o, x, y) - correlate_at(p, h.xy, h.side, o, x, y);
            const double yy = correlate_at(d, h.yy, h.side, o, x, y) - correlate_at(p, h.yy, h.side, o, x, y);
            acc += std::abs(xx) + 2.0 * std::abs(xy) + std::abs(yy);
        }
    }
    return acc / static_cast<double>(d.size());
}

inline double rmse(const ImageD& y, const ImageD& yh) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yh[i]) * (y[i] - yh[i]);
    return std::sqrt(acc / static_cast<double>(y.size()));
}

inline double thacc(const ImageD& y, const ImageD& yh, double delta) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0 && yh[i] > 0 && y[i] / yh[i] < delta && yh[i] / y[i] < delta) ++ok;
    }
    return 100.0 * static_cast<double>(ok) / static_cast<double>(y.size());
}

struct Bin {
    std::size_t count = 0;
    double rmse = 0.0;
};

/// Bins [b, b+1) cm for b = 0..17, by scanning each bin separately.
inline std::vector<Bin> binned_rmse(const ImageD& y, const ImageD& yh) {
    std::vector<Bin> bins(18);
    for (int b = 0; b < 18; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] >= b && y[i] < b + 1) {
                acc += (y[i] - yh[i]) * (y[i] - yh[i]);
                ++bins[static_cast<std::size_t>(b)].count;
            }
        }
        if (bins[static_cast<std::size_t>(b)].count > 0)
            bins[static_cast<std::size_t>(b)].rmse = std::sqrt(acc / static_cast<double>(bins[static_cast<std::size_t>(b)].count));
    }
    return bins;
}

}  // namespace colonsynth::oracle
