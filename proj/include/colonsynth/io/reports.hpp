#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "colonsynth/loss/sfs_loss.hpp"
#include "colonsynth/metrics/depth_metrics.hpp"

namespace colonsynth {

/// Machine-readable report shapes shared by the command-line tool and the
/// trainer bridge. Empty bins carry "rmse": null.
inline nlohmann::json to_json(const DepthBin& b) {
    nlohmann::json j = {{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}};
    j["rmse"] = std::isnan(b.rmse) ? nlohmann::json(nullptr) : nlohmann::json(b.rmse);
    return j;
}

inline nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json j = {{"rmse", r.rmse}, {"thacc", r.thacc}, {"n_pixels", r.n_pixels}, {"n_invalid", r.n_invalid}};
    if (!r.bins.empty()) {
        nlohmann::json bins = nlohmann::json::array();
        for (const auto& b : r.bins) bins.push_back(to_json(b));
        j["bins"] = bins;
    }
    return j;
}

inline nlohmann::json to_json(const MetricAccumulator& acc) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& [name, f] : acc.frames()) {
        frames.push_back({{"name", name}, {"rmse", f.rmse}, {"thacc", f.thacc}, {"n_invalid", f.n_invalid}});
    }
    nlohmann::json j = to_json(acc.summary());
    j["delta"] = acc.delta();
    j["frame_count"] = acc.frame_count();
    j["frames"] = frames;
    return j;
}

inline nlohmann::json to_json(const LossBreakdown& l, const LossWeights& w, double sigma) {
    return {{"L_z", l.L_z}, {"L_e", l.L_e}, {"L_c", l.L_c}, {"total", l.total},
            {"weights", {w.w1, w.w2, w.w3}}, {"sigma", sigma}};
}

/// Per-bin CSV: lo,hi,count,rmse with an empty rmse field for empty bins.
inline std::string bins_csv(const std::vector<DepthBin>& bins) {
    std::ostringstream out;
    out.precision(17);
    out << "lo,hi,count,rmse\n";
    for (const auto& b : bins) {
        out << b.lo << ',' << b.hi << ',' << b.count << ',';
        if (!std::isnan(b.rmse)) out << b.rmse;
        out << '\n';
    }
    return out.str();
}

}  // namespace colonsynth
