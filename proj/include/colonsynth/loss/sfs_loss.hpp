#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "colonsynth/core/image.hpp"
#include "colonsynth/core/reduce.hpp"
#include "colonsynth/loss/kernels.hpp"

namespace colonsynth {

/// Weights of the depth, gradient and curvature terms.
struct LossWeights {
    double w1 = 0.1;
    double w2 = 0.3;
    double w3 = 0.6;

    void validate() const {
        if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w3 >= 0.0)) {
            throw std::invalid_argument("LossWeights: weights must be non-negative");
        }
    }
};

inline constexpr double kDefaultLossSigma = 3.0;

struct LossBreakdown {
    double L_z = 0.0;
    double L_e = 0.0;
    double L_c = 0.0;
    double total = 0.0;
};

/// Weighted sum of precomputed terms; the only place `total` is formed.
inline LossBreakdown combine_loss(double L_z, double L_e, double L_c, const LossWeights& w) {
    w.validate();
    return {L_z, L_e, L_c, w.w1 * L_z + w.w2 * L_e + w.w3 * L_c};
}

struct GradientFields {
    ImageD gx, gy;
};

struct HessianFields {
    ImageD xx, xy, yy;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(std::span<const double>(v)) / static_cast<double>(v.size());
}

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline void require_loss_inputs(const ImageD& d, const ImageD& p, const char* who) {
    require_same_shape(d, p, who);
    if (d.empty()) throw std::invalid_argument(std::string(who) + ": empty image");
}

inline void require_min_side(const ImageD& d, std::size_t side, const char* who) {
    if (d.width() < side || d.height() < side) {
        throw std::invalid_argument(std::string(who) + ": image " + std::to_string(d.width()) + "x" +
                                    std::to_string(d.height()) + " smaller than " + std::to_string(side) + "x" +
                                    std::to_string(side));
    }
}

}  // namespace detail

/// Central-difference image gradients with replicate borders.
inline GradientFields gradients(const ImageD& d) {
    detail::require_min_side(d, 3, "gradients");
    const Kernel1D c = central_difference(), id = identity_kernel();
    return {correlate_separable(d, c, id), correlate_separable(d, id, c)};
}

/// Gaussian-derivative Hessian fields (kernel side round(4 sigma)).
inline HessianFields hessian(const ImageD& d, const GaussianKernels& k) {
    detail::require_min_side(d, k.side(), "hessian");
    return {correlate_separable(d, k.second, k.smooth), correlate_separable(d, k.first, k.first),
            correlate_separable(d, k.smooth, k.second)};
}

inline HessianFields hessian(const ImageD& d, double sigma = kDefaultLossSigma) {
    return hessian(d, make_gaussian_kernels(sigma));
}

/// Mean absolute depth difference.
inline double loss_z(const ImageD& d, const ImageD& p) {
    detail::require_loss_inputs(d, p, "loss_z");
    std::vector<double> t(d.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::abs(d[i] - p[i]);
    return detail::mean_of(t);
}

/// Mean absolute gradient difference, summed over both axes.
inline double loss_e(const ImageD& d, const ImageD& p) {
    detail::require_loss_inputs(d, p, "loss_e");
    const GradientFields a = gradients(d), b = gradients(p);
    std::vector<double> t(d.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = std::abs(a.gx[i] - b.gx[i]) + std::abs(a.gy[i] - b.gy[i]);
    }
    return detail::mean_of(t);
}

/// Mean absolute Hessian difference; the mixed term counts twice.
inline double loss_c(const ImageD& d, const ImageD& p, const GaussianKernels& k) {
    detail::require_loss_inputs(d, p, "loss_c");
    const HessianFields a = hessian(d, k), b = hessian(p, k);
    std::vector<double> t(d.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = std::abs(a.xx[i] - b.xx[i]) + 2.0 * std::abs(a.xy[i] - b.xy[i]) +
               std::abs(a.yy[i] - b.yy[i]);
    }
    return detail::mean_of(t);
}

inline double loss_c(const ImageD& d, const ImageD& p, double sigma = kDefaultLossSigma) {
    return loss_c(d, p, make_gaussian_kernels(sigma));
}

inline LossBreakdown loss_total(const ImageD& d, const ImageD& p, const LossWeights& w, const GaussianKernels& k) {
    w.validate();
    return combine_loss(loss_z(d, p), loss_e(d, p), loss_c(d, p, k), w);
}

inline LossBreakdown loss_total(const ImageD& d, const ImageD& p, const LossWeights& w = {},
                                double sigma = kDefaultLossSigma) {
    return loss_total(d, p, w, make_gaussian_kernels(sigma));
}

/// Analytic (sub)gradient of the weighted total with respect to the
/// prediction `p`, using sign(0) = 0 at the kinks.
inline ImageD loss_gradient(const ImageD& d, const ImageD& p, const LossWeights& w, const GaussianKernels& k) {
    detail::require_loss_inputs(d, p, "loss_gradient");
    w.validate();
    const std::size_t n = d.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    ImageD grad(d.width(), d.height(), 0.0);
    if (w.w1 != 0.0) {
        for (std::size_t i = 0; i < n; ++i) grad[i] += w.w1 * inv_n * detail::sign(p[i] - d[i]);
    }
    // For a linear operator A: d/dp sum |A d - A p| = -A^T sign(A d - A p).
    auto add_term = [&](const ImageD& ad, const ImageD& ap, const Kernel1D& kx, const Kernel1D& ky, double scale) {
        ImageD s(d.width(), d.height());
        for (std::size_t i = 0; i < n; ++i) s[i] = -scale * inv_n * detail::sign(ad[i] - ap[i]);
        const ImageD back = correlate_separable_adjoint(s, kx, ky);
        for (std::size_t i = 0; i < n; ++i) grad[i] += back[i];
    };
    if (w.w2 != 0.0) {
        const GradientFields a = gradients(d), b = gradients(p);
        const Kernel1D c = central_difference(), id = identity_kernel();
        add_term(a.gx, b.gx, c, id, w.w2);
        add_term(a.gy, b.gy, id, c, w.w2);
    }
    if (w.w3 != 0.0) {
        const HessianFields a = hessian(d, k), b = hessian(p, k);
        add_term(a.xx, b.xx, k.second, k.smooth, w.w3);
        add_term(a.xy, b.xy, k.first, k.first, 2.0 * w.w3);
        add_term(a.yy, b.yy, k.smooth, k.second, w.w3);
    }
    return grad;
}

inline ImageD loss_gradient(const ImageD& d, const ImageD& p, const LossWeights& w = {},
                            double sigma = kDefaultLossSigma) {
    return loss_gradient(d, p, w, make_gaussian_kernels(sigma));
}

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;   // pixels at or near an absolute-value kink
    ImageD analytic;
    ImageD numeric;            // NaN where skipped
};

namespace detail {

/// Sign pattern of every absolute-value argument in the weighted loss.
inline std::vector<signed char> kink_signature(const ImageD& d, const ImageD& p, const LossWeights& w,
                                               const GaussianKernels& k) {
    std::vector<signed char> s;
    auto push = [&](const ImageD& a, const ImageD& b) {
        for (std::size_t i = 0; i < a.size(); ++i) s.push_back(static_cast<signed char>(sign(a[i] - b[i])));
    };
    if (w.w1 != 0.0) push(d, p);
    if (w.w2 != 0.0) {
        const GradientFields a = gradients(d), b = gradients(p);
        push(a.gx, b.gx);
        push(a.gy, b.gy);
    }
    if (w.w3 != 0.0) {
        const HessianFields a = hessian(d, k), b = hessian(p, k);
        push(a.xx, b.xx);
        push(a.xy, b.xy);
        push(a.yy, b.yy);
    }
    return s;
}

}  // namespace detail

/// Compares the analytic gradient with central differences of the total loss.
/// Pixels with |d - p| <= eps, or whose +-eps perturbation flips (or touches)
/// the sign of any absolute-value argument, are skipped: the loss is
/// piecewise linear in p, so central differences are exact everywhere else.
/// Relative errors use max(|analytic|, |numeric|, 1e-3 * max_p |analytic_p|)
/// as denominator, so pixels whose true gradient is zero compare against the
/// gradient scale rather than against rounding noise.
inline GradCheckReport grad_check(const ImageD& d, const ImageD& p, const LossWeights& w = {},
                                  double sigma = kDefaultLossSigma, double eps = 1e-4) {
    detail::require_loss_inputs(d, p, "grad_check");
    if (d.width() > 32 || d.height() > 32) throw std::invalid_argument("grad_check: images larger than 32x32");
    if (!(eps >= 1e-6 && eps <= 1e-3)) throw std::invalid_argument("grad_check: eps outside [1e-6, 1e-3]");
    const GaussianKernels k = make_gaussian_kernels(sigma);
    GradCheckReport r;
    r.analytic = loss_gradient(d, p, w, k);
    r.numeric = ImageD(d.width(), d.height(), std::nan(""));
    const auto base = detail::kink_signature(d, p, w, k);
    bool base_on_kink = false;
    for (auto v : base) base_on_kink = base_on_kink || v == 0;

    double scale = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) scale = std::max(scale, std::abs(r.analytic[i]));
    const double floor = std::max(1e-3 * scale, 1e-300);

    ImageD q = p;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (std::abs(d[i] - p[i]) <= eps) {
            ++r.skipped;
            continue;
        }
        const double orig = q[i];
        q[i] = orig + eps;
        const double fp = loss_total(d, q, w, k).total;
        const bool kink_p = detail::kink_signature(d, q, w, k) != base;
        q[i] = orig - eps;
        const double fm = loss_total(d, q, w, k).total;
        const bool kink_m = detail::kink_signature(d, q, w, k) != base;
        q[i] = orig;
        if (kink_p || kink_m || base_on_kink) {
            ++r.skipped;
            continue;
        }
        const double num = (fp - fm) / (2.0 * eps);
        r.numeric[i] = num;
        const double a = r.analytic[i];
        const double denom = std::max({std::abs(a), std::abs(num), floor});
        r.max_relative_error = std::max(r.max_relative_error, std::abs(a - num) / denom);
        ++r.checked;
    }
    return r;
}

}  // namespace colonsynth
