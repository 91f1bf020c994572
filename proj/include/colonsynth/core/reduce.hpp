#pragma once

#include <cstddef>
#include <span>

namespace colonsynth {

/// Pairwise (cascade) summation. Fixed association order, so the result is
/// reproducible regardless of how the caller was scheduled.
inline double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 64;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace colonsynth
