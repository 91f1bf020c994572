// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "colonsynth/cli.hpp"
#include "colonsynth/dataset/gamma.hpp"
#include "colonsynth/geometry/colon_model.hpp"
#include "colonsynth/loss/sfs_loss.hpp"
#include "colonsynth/metrics/depth_metrics.hpp"
#include "colonsynth/recon/reconstruct.hpp"
#include "colonsynth/render/bvh.hpp"
#include "colonsynth/render/png_io.hpp"
#include "colonsynth/render/renderer.hpp"
#include "colonsynth/scene/camera.hpp"
#include "colonsynth/scene/materials.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace colonsynth;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail.clear();
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("colonsynth_acceptance_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

Verdict inverse_square_shading() {
    Verdict v;
    std::vector<double> r, intensity;
    for (double d = 2; d <= 12; d += 1) {
        const auto plane = fixtures::wall_plane(d, 60.0);
        const Bvh bvh(plane);
        const auto K = Intrinsics::for_image(9, 9);
        const CameraPose pose{};
        const auto f = render_linear(bvh, assign_materials(1, 0, 1), pose, K, LightSource::at_camera(pose));
        r.push_back(d);
        intensity.push_back(f.radiance(4, 4).x);
    }
    const double slope = loglog_slope(r, intensity);
    v.detail = "slope " + fmt("%.4f", slope);
    v.require(std::abs(slope + 2.0) <= 0.05, "slope " + fmt("%.4f", slope) + " outside -2 +- 0.05");
    return v;
}

Verdict anatomy_conformance() {
    Verdict v;
    double len_lo = 1e9, len_hi = 0, gap_lo = 1e9, gap_hi = 0, dia_lo = 1e9, dia_hi = 0, worst_deform = 0;
    std::size_t folds_lo = 1000, folds_hi = 0, polyps_lo = 1000, polyps_hi = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto m = build_colon_model(seed, 5);
        const double L = m.centerline.length();
        len_lo = std::min(len_lo, L);
        len_hi = std::max(len_hi, L);
        folds_lo = std::min(folds_lo, m.folds.count());
        folds_hi = std::max(folds_hi, m.folds.count());
        for (std::size_t i = 1; i < m.folds.count(); ++i) {
            const double g = m.folds.axial_positions[i] - m.folds.axial_positions[i - 1];
            gap_lo = std::min(gap_lo, g);
            gap_hi = std::max(gap_hi, g);
        }
        for (double d : m.folds.diameters) {
            dia_lo = std::min(dia_lo, d);
            dia_hi = std::max(dia_hi, d);
        }
        polyps_lo = std::min(polyps_lo, m.polyps.size());
        polyps_hi = std::max(polyps_hi, m.polyps.size());
        for (const auto& p : m.polyps) {
            const auto shape = make_polyp(p.spec);
            const double r = p.spec.radius_cm();
            for (const auto& q : shape.vertices) worst_deform = std::max(worst_deform, std::abs(length(q) / r - 1.0));
        }
        v.require(m.warnings.empty(), "seed " + std::to_string(seed) + " produced warnings");
    }
    constexpr double tol = 1e-9;
    v.require(len_lo >= 177.0 && len_hi <= 197.0, "length outside 187 +- 10");
    v.require(folds_lo >= 30 && folds_hi <= 60, "fold count outside [30, 60]");
    v.require(gap_lo >= 3.0 - tol && gap_hi <= 6.0 + tol, "fold spacing outside [3, 6]");
    v.require(dia_lo >= 2.8 && dia_hi <= 7.5, "fold diameter outside [2.8, 7.5]");
    v.require(polyps_lo >= 8 && polyps_hi <= 12, "polyp count outside 10 +- 2");
    v.require(worst_deform <= 0.1 + tol, "polyp deformation above 10%");
    if (v.pass) {
        v.detail = "length " + fmt("%.1f", len_lo) + ".." + fmt("%.1f", len_hi) + " cm, folds " + std::to_string(folds_lo) +
                   ".." + std::to_string(folds_hi) + ", spacing " + fmt("%.2f", gap_lo) + ".." + fmt("%.2f", gap_hi) +
                   " cm, fold diameter " + fmt("%.2f", dia_lo) + ".." + fmt("%.2f", dia_hi) + " cm, polyps " +
                   std::to_string(polyps_lo) + ".." + std::to_string(polyps_hi) + ", max deformation " +
                   fmt("%.3f", worst_deform);
    }
    return v;
}

Verdict level_matrix() {
    Verdict v;
    // Colon features and polyp model per level, transcribed from the level table.
    struct Row { bool folds, deformed, irregular, specular, texture; PolypVariant polyp; };
    const Row table[5] = {{false, false, false, false, false, PolypVariant::Sphere},
                          {true, false, false, false, false, PolypVariant::Sphere},
                          {true, true, false, false, false, PolypVariant::Deformed},
                          {true, true, true, true, false, PolypVariant::Deformed},
                          {true, true, true, true, true, PolypVariant::Deformed}};
    for (int l = 1; l <= 5; ++l) {
        const auto c = level_config(l);
        const auto& e = table[l - 1];
        v.require(c.folds == e.folds && c.deformed_lumen == e.deformed && c.surface_irregularities == e.irregular &&
                      c.specular == e.specular && c.texture == e.texture && c.polyp_variant == e.polyp,
                  "level " + std::to_string(l) + " differs from the table");
    }
    std::size_t changes = 0;
    for (std::size_t i = 0; i + 1 < 60; ++i) {
        const bool changed = assign_materials(5, i, 42).texture_seed != assign_materials(5, i + 1, 42).texture_seed;
        const bool boundary = (i + 1) % 3 == 0;
        v.require(changed == boundary, "texture seed change pattern broken at frame " + std::to_string(i + 1));
        changes += changed;
    }
    if (v.pass) v.detail = "5 levels match; " + std::to_string(changes) + " texture changes over 60 frames";
    return v;
}

Verdict loss_oracles() {
    Verdict v;
    Rng rng(2024);
    const auto k = make_gaussian_kernels(3.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto w = static_cast<std::size_t>(rng.uniform_int(12, 32));
        const auto h = static_cast<std::size_t>(rng.uniform_int(12, 32));
        const auto d = oracle::random_image(w, h, rng), p = oracle::random_image(w, h, rng);
        worst = std::max({worst, std::abs(loss_z(d, p) - oracle::loss_z(d, p)),
                          std::abs(loss_e(d, p) - oracle::loss_e(d, p)),
                          std::abs(loss_c(d, p, k) - oracle::loss_c(d, p, k))});
    }
    v.require(worst <= 1e-12, "oracle mismatch " + fmt("%.3g", worst));
    const auto h2 = hessian_kernels_2d(k);
    v.require(k.side() == 12 && h2.side == 12 && h2.xx.size() == 144, "sigma 3 kernels are not 12x12");
    const LossWeights configs[4] = {{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0.1, 0.3, 0.6}};
    const auto d = oracle::random_image(24, 24, rng), p = oracle::random_image(24, 24, rng);
    for (const auto& w : configs) {
        const auto l = loss_total(d, p, w, k);
        const double expect = w.w1 * l.L_z + w.w2 * l.L_e + w.w3 * l.L_c;
        v.require(std::isfinite(l.total) && std::abs(l.total - expect) <= 1e-12 * std::max(1.0, expect),
                  "weight config not evaluable");
    }
    if (v.pass) v.detail = "100 pairs, max |diff| " + fmt("%.2g", worst) + "; 12x12 kernels; 4 weight configs";
    return v;
}

Verdict gradient_check() {
    Verdict v;
    Rng rng(99);
    double worst = 0.0;
    std::size_t checked = 0, skipped = 0;
    for (int t = 0; t < 5; ++t) {
        const auto d = oracle::random_image(16, 16, rng, 1.0, 20.0), p = oracle::random_image(16, 16, rng, 1.0, 20.0);
        const auto r = grad_check(d, p, LossWeights{}, 3.0, 1e-4);
        worst = std::max(worst, r.max_relative_error);
        checked += r.checked;
        skipped += r.skipped;
    }
    v.require(worst < 1e-4, "max relative error " + fmt("%.3g", worst));
    v.require(checked > skipped, "too few pixels away from kinks");
    if (v.pass) {
        v.detail = "max rel err " + fmt("%.2g", worst) + " over " + std::to_string(checked) + " pixels (" +
                   std::to_string(skipped) + " near kinks skipped)";
    }
    return v;
}

Verdict metric_oracles() {
    Verdict v;
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto y = oracle::random_image(31, 23, rng, 0.0, 20.0), yh = oracle::random_image(31, 23, rng, 0.1, 20.0);
        v.require(rmse(y, yh) == oracle::rmse(y, yh), "rmse differs from oracle");
        v.require(thacc(y, yh) == oracle::thacc(y, yh, 1.25), "thacc differs from oracle");
        const auto b = binned_rmse(y, yh);
        const auto ob = oracle::binned_rmse(y, yh);
        v.require(b.size() == 18 && b.front().lo == 0.0 && b.back().hi == 18.0, "bins are not 18 over [0, 18)");
        for (std::size_t i = 0; i < std::min(b.size(), ob.size()); ++i) {
            v.require(b[i].count == ob[i].count, "bin count differs");
            if (b[i].count > 0) v.require(b[i].rmse == ob[i].rmse, "bin rmse differs");
        }
    }
    // Ratio exactly 1.25 fails the strict threshold.
    ImageD y(2, 1, 4.0), yh(2, 1, 4.0);
    yh[0] = 5.0;
    v.require(thacc(y, yh) == 50.0, "delta = 1.25 is not strict");
    if (v.pass) v.detail = "50 random pairs exact; strict delta 1.25; 18 one-cm bins";
    return v;
}

Verdict reconstruction_roundtrip() {
    Verdict v;
    const auto model = build_colon_model(17, 5);
    const Bvh bvh(model.mesh);
    const auto path = generate_camera_path(model.centerline.curve, bvh, 50, camera_seed(17));
    Intrinsics full = Intrinsics::for_image(1280, 1080);
    full.focal_px = 448.13;
    const Intrinsics K = full.rescaled(320, 270);
    const auto dir = scratch_dir("recon");
    std::size_t total = 0, close = 0;
    double worst = 0.0;
    for (std::size_t i : {10u, 25u, 40u}) {
        const auto& pose = path.poses[i];
        const auto f = render_linear(bvh, assign_materials(5, i, 17), pose, K, LightSource::at_camera(pose));
        const auto png = dir / ("depth_" + std::to_string(i) + ".png");
        write_depth_png(png.string(), f.depth);
        const auto cloud = backproject(read_depth_png(png.string()), K);
        for (const auto& p : cloud.points) {
            const double dist = bvh.closest_point(camera_to_world(pose, p)).distance;
            worst = std::max(worst, dist);
            close += dist <= 0.05;
            ++total;
        }
    }
    const double frac = total ? static_cast<double>(close) / static_cast<double>(total) : 0.0;
    v.require(total > 100000, "too few valid depth pixels");
    v.require(frac >= 0.99, "only " + fmt("%.4f", 100 * frac) + "% within 0.05 cm");
    if (v.pass) v.detail = fmt("%.3f", 100 * frac) + "% of " + std::to_string(total) + " points within 0.05 cm (f = " +
                           fmt("%.4f", K.focal_px) + " px, worst " + fmt("%.2g", worst) + " cm)";
    return v;
}

Verdict gamma_roundtrip() {
    Verdict v;
    Rng rng(5);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double d = rng.uniform(1e-6, 25.0);
        worst = std::max(worst, std::abs(gamma_decode(gamma_encode(d)) - d) / d);
    }
    v.require(worst < 1e-9, "relative error " + fmt("%.3g", worst));
    v.require(gamma_encode(0.0) == 0.0 && gamma_encode(25.0) == 1.0, "endpoints do not map 0 -> 0, 25 -> 1");
    if (v.pass) v.detail = "max rel err " + fmt("%.2g", worst) + " over 1e5 depths; 0 -> 0, 25 -> 1";
    return v;
}

Verdict determinism() {
    Verdict v;
    const unsigned many = std::max(2u, std::thread::hardware_concurrency());
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, many, 1u}) {
        const auto d = scratch_dir("det_" + std::to_string(dirs.size()));
        const std::vector<std::string> args = {"colonsynth", "--threads", std::to_string(threads), "generate", "--level",
                                               "5", "--seed", "123", "--frames", "4", "--width", "160", "--height",
                                               "135", "--quiet", "--out", d.string()};
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        v.require(cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err) == 0, "generate failed: " + err.str());
        dirs.push_back(d);
    }
    set_max_threads(0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
        const auto name = e.path().filename();
        const auto ref = slurp(e.path());
        for (std::size_t k = 1; k < dirs.size(); ++k) v.require(slurp(dirs[k] / name) == ref, name.string() + " differs");
        ++files;
    }
    v.require(files == 9, "expected 8 PNGs and a manifest");
    if (v.pass) v.detail = std::to_string(files) + " files byte-identical at 1, " + std::to_string(many) + ", 1 threads";
    return v;
}

Verdict throughput() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = build_colon_model(31, 5);
    const Bvh bvh(model.mesh);
    const auto path = generate_camera_path(model.centerline.curve, bvh, 60, camera_seed(31));
    const double setup = seconds_since(t0);
    const auto K = Intrinsics::for_image(320, 270);
    RenderSettings single;
    single.threads = 1;
    const auto dir = scratch_dir("throughput");
    double worst = 0.0, sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < 60; i += 6) {
        const auto t = std::chrono::steady_clock::now();
        const auto& pose = path.poses[i];
        const auto lin = render_linear(bvh, assign_materials(5, i, 31), pose, K, LightSource::at_camera(pose), single);
        write_png_rgb8((dir / "rgb.png").string(), tone_map(lin.radiance, auto_exposure(lin.radiance)));
        write_depth_png((dir / "depth.png").string(), lin.depth);
        const double s = seconds_since(t);
        worst = std::max(worst, s);
        sum += s;
        ++n;
    }
    v.require(worst < 1.0, "slowest frame " + fmt("%.3f", worst) + " s");
    if (v.pass) v.detail = "single thread: mean " + fmt("%.3f", sum / static_cast<double>(n)) + " s, worst " +
                           fmt("%.3f", worst) + " s per frame (scene setup " + fmt("%.2f", setup) + " s)";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"inverse-square shading", inverse_square_shading},
        {"anatomy conformance", anatomy_conformance},
        {"level matrix", level_matrix},
        {"loss oracle equivalence", loss_oracles},
        {"gradient check", gradient_check},
        {"metric oracle equivalence", metric_oracles},
        {"reconstruction roundtrip", reconstruction_roundtrip},
        {"gamma roundtrip", gamma_roundtrip},
        {"determinism", determinism},
        {"desk-scale throughput", throughput},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s  %-26s %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::error_code ec;
    fs::remove_all(fs::temp_directory_path() / ("colonsynth_acceptance_" + std::to_string(::getpid())), ec);
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
