#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "colonsynth/core/image.hpp"

namespace colonsynth {

/// 1-D correlation kernel: out(i) = sum_m taps[m] * in(clamp(i + m - origin)).
struct Kernel1D {
    std::vector<double> taps;
    std::ptrdiff_t origin = 0;

    std::size_t size() const { return taps.size(); }
};

/// Central difference [-1/2, 0, 1/2].
inline Kernel1D central_difference() { return {{-0.5, 0.0, 0.5}, 1}; }

/// Sampled Gaussian and its first two derivatives, side round(4 sigma).
/// Taps sit at x_m = m - (N - 1) / 2; for even N these are half-integer offsets,
/// which puts every output half a pixel before its index, identically for all
/// three kernels. Normalization makes each exact on low-order polynomials:
/// sum k0 = 1; sum k1 = 0, sum x k1 = 1; sum k2 = 0, sum x^2/2 k2 = 1.
struct GaussianKernels {
    double sigma = 3.0;
    Kernel1D smooth;  // k0
    Kernel1D first;   // k1
    Kernel1D second;  // k2

    std::size_t side() const { return smooth.size(); }
};

inline std::size_t gaussian_kernel_side(double sigma) {
    return std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(4.0 * sigma)));
}

inline GaussianKernels make_gaussian_kernels(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian_kernels: sigma must be positive");
    const std::size_t n = gaussian_kernel_side(sigma);
    const double centre = 0.5 * static_cast<double>(n - 1);
    const auto origin = static_cast<std::ptrdiff_t>(n / 2);
    std::vector<double> x(n), g(n), k1(n), k2(n);
    const double s2 = sigma * sigma;
    for (std::size_t m = 0; m < n; ++m) {
        x[m] = static_cast<double>(m) - centre;
        g[m] = std::exp(-x[m] * x[m] / (2.0 * s2));
        k1[m] = x[m] * g[m];
        k2[m] = (x[m] * x[m] / (s2 * s2) - 1.0 / s2) * g[m];
    }
    double sg = 0.0, m1 = 0.0, sk2 = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        sg += g[m];
        m1 += x[m] * k1[m];
        sk2 += k2[m];
    }
    // Remove the residual DC of k2 with a Gaussian-shaped correction, then fix its second moment.
    double m2 = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        k2[m] -= sk2 / sg * g[m];
        m2 += 0.5 * x[m] * x[m] * k2[m];
    }
    GaussianKernels k;
    k.sigma = sigma;
    k.smooth.origin = k.first.origin = k.second.origin = origin;
    for (std::size_t m = 0; m < n; ++m) {
        k.smooth.taps.push_back(g[m] / sg);
        k.first.taps.push_back(k1[m] / m1);
        k.second.taps.push_back(k2[m] / m2);
    }
    // Exact antisymmetry for k1: mirror-average so the taps sum to zero up to rounding.
    for (std::size_t m = 0; m < n / 2; ++m) {
        const double a = 0.5 * (k.first.taps[m] - k.first.taps[n - 1 - m]);
        k.first.taps[m] = a;
        k.first.taps[n - 1 - m] = -a;
    }
    if (n % 2 == 1) k.first.taps[n / 2] = 0.0;
    return k;
}

/// Dense 2-D Hessian kernels (outer products), rows indexed by y.
struct HessianKernels2D {
    std::size_t side = 0;
    std::vector<double> xx, xy, yy;  // side * side, row-major [y][x]
};

inline HessianKernels2D hessian_kernels_2d(const GaussianKernels& k) {
    HessianKernels2D h;
    h.side = k.side();
    const std::size_t n = h.side;
    h.xx.resize(n * n);
    h.xy.resize(n * n);
    h.yy.resize(n * n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            h.xx[y * n + x] = k.second.taps[x] * k.smooth.taps[y];
            h.xy[y * n + x] = k.first.taps[x] * k.first.taps[y];
            h.yy[y * n + x] = k.smooth.taps[x] * k.second.taps[y];
        }
    }
    return h;
}

namespace detail {
inline std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}
}  // namespace detail

/// Separable correlation with replicate borders: kx along x, then ky along y.
inline ImageD correlate_separable(const ImageD& in, const Kernel1D& kx, const Kernel1D& ky) {
    const std::size_t w = in.width(), h = in.height();
    ImageD tmp(w, h), out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::size_t m = 0; m < kx.size(); ++m) {
                const auto xi = static_cast<std::ptrdiff_t>(x + m) - kx.origin;
                acc += kx.taps[m] * in(detail::clamp_index(xi, w), y);
            }
            tmp(x, y) = acc;
        }
    }
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::size_t m = 0; m < ky.size(); ++m) {
                const auto yi = static_cast<std::ptrdiff_t>(y + m) - ky.origin;
                acc += ky.taps[m] * tmp(x, detail::clamp_index(yi, h));
            }
            out(x, y) = acc;
        }
    }
    return out;
}

/// Adjoint of correlate_separable: scatters each output sensitivity back to the
/// (clamped) input pixels it was read from.
inline ImageD correlate_separable_adjoint(const ImageD& grad_out, const Kernel1D& kx, const Kernel1D& ky) {
    const std::size_t w = grad_out.width(), h = grad_out.height();
    ImageD tmp(w, h, 0.0), out(w, h, 0.0);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t m = 0; m < ky.size(); ++m) {
                const auto yi = static_cast<std::ptrdiff_t>(y + m) - ky.origin;
                tmp(x, detail::clamp_index(yi, h)) += ky.taps[m] * grad_out(x, y);
            }
        }
    }
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            for (std::size_t m = 0; m < kx.size(); ++m) {
                const auto xi = static_cast<std::ptrdiff_t>(x + m) - kx.origin;
                out(detail::clamp_index(xi, w), y) += kx.taps[m] * tmp(x, y);
            }
        }
    }
    return out;
}

/// Identity kernel (single unit tap).
inline Kernel1D identity_kernel() { return {{1.0}, 0}; }

}  // namespace colonsynth
