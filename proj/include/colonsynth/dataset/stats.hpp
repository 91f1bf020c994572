#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "colonsynth/dataset/manifest.hpp"
#include "colonsynth/render/png_io.hpp"

namespace colonsynth {

/// Fixed-width histogram over [lo, hi); values outside are counted apart.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> counts;
    std::size_t below = 0;
    std::size_t above = 0;

    Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {
        if (bins == 0 || !(hi > lo)) throw std::invalid_argument("Histogram: bad range or bin count");
    }

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }

    void add(double v) {
        if (v < lo) {
            ++below;
        } else if (!(v < hi)) {
            ++above;
        } else {
            auto b = static_cast<std::size_t>(std::floor((v - lo) / bin_width()));
            ++counts[std::min(b, counts.size() - 1)];
        }
    }

    std::size_t total() const {
        std::size_t n = below + above;
        for (auto c : counts) n += c;
        return n;
    }
};

inline nlohmann::json to_json(const Histogram& h) {
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t i = 0; i <= h.counts.size(); ++i) edges.push_back(h.lo + h.bin_width() * static_cast<double>(i));
    return {{"edges", edges}, {"counts", h.counts}, {"below", h.below}, {"above", h.above}};
}

/// Gaps between consecutive fold positions, cm.
inline std::vector<double> fold_spacings(const std::vector<double>& positions) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < positions.size(); ++i) gaps.push_back(positions[i] - positions[i - 1]);
    return gaps;
}

struct VideoStatsOptions {
    std::size_t frame_stride = 1;   // depth histogram reads every n-th frame
    double depth_bin_cm = 1.0;
    double spacing_bin_cm = 0.5;
};

/// Length report, fold-spacing histogram and depth-value histogram for one
/// rendered video. Depth PNGs are resolved relative to the manifest directory.
inline nlohmann::json video_stats(const std::filesystem::path& manifest_path, const VideoStatsOptions& opt = {}) {
    if (opt.frame_stride == 0) throw std::invalid_argument("video_stats: frame stride must be >= 1");
    const VideoManifest m = read_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();

    nlohmann::json segments = nlohmann::json::object();
    for (const auto& [name, len] : m.model.segment_lengths_cm) segments[name] = len;

    const auto spacing = fold_spacings(m.model.fold_positions_cm);
    Histogram spacing_hist(0.0, 10.0, static_cast<std::size_t>(std::lround(10.0 / opt.spacing_bin_cm)));
    for (double g : spacing) spacing_hist.add(g);
    double min_gap = spacing.empty() ? 0.0 : *std::min_element(spacing.begin(), spacing.end());
    double max_gap = spacing.empty() ? 0.0 : *std::max_element(spacing.begin(), spacing.end());

    const double d_max = m.gamma.d_max;
    Histogram depth_hist(0.0, d_max, static_cast<std::size_t>(std::lround(d_max / opt.depth_bin_cm)));
    std::size_t misses = 0, frames_read = 0;
    for (std::size_t i = 0; i < m.frames.size(); i += opt.frame_stride) {
        const ImageD d = read_depth_png((dir / m.frames[i].depth).string(), d_max);
        for (std::size_t p = 0; p < d.size(); ++p) {
            if (d[p] >= d_max) {
                ++misses;
            } else {
                depth_hist.add(d[p]);
            }
        }
        ++frames_read;
    }

    return {{"video_id", m.video_id},
            {"level", m.level},
            {"length",
             {{"centerline_length_cm", m.model.centerline_length_cm},
              {"segments_cm", segments},
              {"hepatic_flexure_deg", m.model.hepatic_flexure_deg},
              {"splenic_flexure_deg", m.model.splenic_flexure_deg}}},
            {"folds",
             {{"count", m.model.fold_positions_cm.size()},
              {"min_spacing_cm", min_gap},
              {"max_spacing_cm", max_gap},
              {"spacing_histogram", to_json(spacing_hist)}}},
            {"polyps", m.model.polyps.size()},
            {"depth",
             {{"frames_read", frames_read},
              {"miss_pixels", misses},
              {"histogram", to_json(depth_hist)}}}};
}

}  // namespace colonsynth
