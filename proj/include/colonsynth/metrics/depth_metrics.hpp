#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <stdexcept>
#include <vector>

#include "colonsynth/core/image.hpp"

namespace colonsynth {

namespace detail {
/// Plain left-to-right accumulation: deterministic and reproducible by any loop.
inline double sequential_sum(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}
}  // namespace detail

/// Root mean squared error in cm.
inline double rmse(const ImageD& y, const ImageD& y_hat) {
    require_same_shape(y, y_hat, "rmse");
    if (y.empty()) throw std::invalid_argument("rmse: empty images");
    std::vector<double> sq(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        sq[i] = d * d;
    }
    return std::sqrt(detail::sequential_sum(sq) / static_cast<double>(y.size()));
}

struct ThresholdReport {
    double percent = 0.0;
    std::size_t n_pixels = 0;
    std::size_t n_within = 0;
    std::size_t n_invalid = 0;  // non-positive pixels, counted as failures
};

/// Percentage of pixels with max(y / y_hat, y_hat / y) < delta (strict).
inline ThresholdReport threshold_accuracy(const ImageD& y, const ImageD& y_hat, double delta = 1.25) {
    require_same_shape(y, y_hat, "thacc");
    if (y.empty()) throw std::invalid_argument("thacc: empty images");
    ThresholdReport r;
    r.n_pixels = y.size();
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(y_hat[i] > 0.0)) {
            ++r.n_invalid;
            continue;
        }
        if (std::max(y[i] / y_hat[i], y_hat[i] / y[i]) < delta) ++r.n_within;
    }
    r.percent = 100.0 * static_cast<double>(r.n_within) / static_cast<double>(r.n_pixels);
    return r;
}

inline double thacc(const ImageD& y, const ImageD& y_hat, double delta = 1.25) {
    return threshold_accuracy(y, y_hat, delta).percent;
}

struct DepthBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double rmse = std::numeric_limits<double>::quiet_NaN();  // NaN marks an empty bin
};

struct BinSpec {
    double lo = 0.0;
    double hi = 18.0;
    std::size_t count = 18;
};

namespace detail {
/// Squared errors per ground-truth bin, in pixel order.
inline std::vector<std::vector<double>> binned_squared_errors(const ImageD& y, const ImageD& y_hat, const BinSpec& spec) {
    require_same_shape(y, y_hat, "binned_rmse");
    if (spec.count == 0 || !(spec.hi > spec.lo)) throw std::invalid_argument("binned_rmse: bad bin spec");
    const double width = (spec.hi - spec.lo) / static_cast<double>(spec.count);
    std::vector<std::vector<double>> sq(spec.count);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] >= spec.lo) || !(y[i] < spec.hi)) continue;
        auto b = static_cast<std::size_t>(std::floor((y[i] - spec.lo) / width));
        if (b >= spec.count) b = spec.count - 1;  // guard against rounding at the upper edge
        const double d = y[i] - y_hat[i];
        sq[b].push_back(d * d);
    }
    return sq;
}

inline DepthBin make_bin(const BinSpec& spec, std::size_t b, double sq_sum, std::size_t count) {
    const double width = (spec.hi - spec.lo) / static_cast<double>(spec.count);
    DepthBin bin;
    bin.lo = spec.lo + width * static_cast<double>(b);
    bin.hi = spec.lo + width * static_cast<double>(b + 1);
    bin.count = count;
    if (count > 0) bin.rmse = std::sqrt(sq_sum / static_cast<double>(count));
    return bin;
}
}  // namespace detail

/// RMSE per ground-truth depth range; pixel p goes to bin floor((y_p - lo) / width).
/// Pixels outside [lo, hi) are not binned.
inline std::vector<DepthBin> binned_rmse(const ImageD& y, const ImageD& y_hat, const BinSpec& spec = {}) {
    const auto sq = detail::binned_squared_errors(y, y_hat, spec);
    std::vector<DepthBin> bins;
    for (std::size_t b = 0; b < spec.count; ++b) bins.push_back(detail::make_bin(spec, b, detail::sequential_sum(sq[b]), sq[b].size()));
    return bins;
}

struct MetricReport {
    double rmse = 0.0;
    double thacc = 0.0;
    std::size_t n_pixels = 0;
    std::size_t n_invalid = 0;
    std::vector<DepthBin> bins;
};

inline MetricReport evaluate_depth(const ImageD& y, const ImageD& y_hat, bool with_bins = false, double delta = 1.25) {
    MetricReport r;
    r.rmse = rmse(y, y_hat);
    const auto t = threshold_accuracy(y, y_hat, delta);
    r.thacc = t.percent;
    r.n_pixels = t.n_pixels;
    r.n_invalid = t.n_invalid;
    if (with_bins) r.bins = binned_rmse(y, y_hat);
    return r;
}

/// Metrics over a sequence of frame pairs. The set RMSE and thacc are the
/// means of the per-frame values; bins pool pixels across all frames.
class MetricAccumulator {
public:
    explicit MetricAccumulator(double delta = 1.25, std::optional<BinSpec> bins = std::nullopt)
        : delta_(delta), bins_(bins) {
        if (bins_) {
            sq_sum_.assign(bins_->count, 0.0);
            count_.assign(bins_->count, 0);
        }
    }

    const MetricReport& add(const std::string& name, const ImageD& y, const ImageD& y_hat) {
        frames_.push_back({name, evaluate_depth(y, y_hat, false, delta_)});
        if (bins_) {
            const auto sq = detail::binned_squared_errors(y, y_hat, *bins_);
            for (std::size_t i = 0; i < sq.size(); ++i) {
                sq_sum_[i] += detail::sequential_sum(sq[i]);
                count_[i] += sq[i].size();
            }
        }
        return frames_.back().second;
    }

    std::size_t frame_count() const { return frames_.size(); }
    const std::vector<std::pair<std::string, MetricReport>>& frames() const { return frames_; }
    double delta() const { return delta_; }

    MetricReport summary() const {
        MetricReport r;
        if (frames_.empty()) throw std::invalid_argument("MetricAccumulator: no frames");
        std::vector<double> rm, th;
        for (const auto& [name, f] : frames_) {
            rm.push_back(f.rmse);
            th.push_back(f.thacc);
            r.n_pixels += f.n_pixels;
            r.n_invalid += f.n_invalid;
        }
        r.rmse = detail::sequential_sum(rm) / static_cast<double>(rm.size());
        r.thacc = detail::sequential_sum(th) / static_cast<double>(th.size());
        if (bins_) {
            for (std::size_t i = 0; i < bins_->count; ++i) r.bins.push_back(detail::make_bin(*bins_, i, sq_sum_[i], count_[i]));
        }
        return r;
    }

private:
    double delta_;
    std::optional<BinSpec> bins_;
    std::vector<double> sq_sum_;
    std::vector<std::size_t> count_;
    std::vector<std::pair<std::string, MetricReport>> frames_;
};

}  // namespace colonsynth
