#pragma once

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "colonsynth/core/parallel.hpp"
#include "colonsynth/dataset/collection.hpp"
#include "colonsynth/dataset/gamma.hpp"
#include "colonsynth/dataset/manifest.hpp"
#include "colonsynth/dataset/stats.hpp"
#include "colonsynth/dataset/video.hpp"
#include "colonsynth/io/reports.hpp"
#include "colonsynth/loss/sfs_loss.hpp"
#include "colonsynth/loss/tensor_io.hpp"
#include "colonsynth/metrics/depth_metrics.hpp"
#include "colonsynth/recon/reconstruct.hpp"
#include "colonsynth/render/png_io.hpp"

namespace colonsynth::cli {

namespace fs = std::filesystem;

inline constexpr const char* kOutputEnv = "COLONSYNTH_OUT";

/// Raised for argument combinations CLI11 cannot express; exits with 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Depth in cm from a 16-bit depth PNG or a raw float tensor. Tensors may hold
/// gamma-encoded values, which are decoded when `gamma_encoded` is set.
inline ImageD load_depth(const fs::path& path, bool gamma_encoded = false) {
    if (path.extension() == ".png") return read_depth_png(path.string());
    const ImageD t = read_tensor(path.string());
    return gamma_encoded ? invert_gamma(t) : t;
}

inline bool is_depth_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".png" || ext == ".f32" || ext == ".bin" || ext == ".tensor";
}

/// Frame files of a directory: the manifest's depth list when present,
/// otherwise every depth-like file in name order.
inline std::vector<fs::path> depth_files(const fs::path& dir) {
    std::vector<fs::path> files;
    if (fs::exists(dir / kManifestFileName)) {
        for (const auto& f : read_manifest(dir / kManifestFileName).frames) files.push_back(dir / f.depth);
        return files;
    }
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && is_depth_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

/// The prediction for a ground-truth frame: same file name, or same stem
/// with any depth extension.
inline fs::path matching_prediction(const fs::path& pred_dir, const fs::path& gt_file) {
    if (fs::exists(pred_dir / gt_file.filename())) return pred_dir / gt_file.filename();
    for (const char* ext : {".png", ".f32", ".bin", ".tensor"}) {
        const auto p = pred_dir / (gt_file.stem().string() + ext);
        if (fs::exists(p)) return p;
    }
    throw std::runtime_error("no prediction for " + gt_file.filename().string() + " in " + pred_dir.string());
}

inline fs::path default_output(const std::optional<std::string>& given, const std::string& leaf = {}) {
    if (given) return *given;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return leaf.empty() ? fs::path(env) : fs::path(env) / leaf;
    throw UsageError("--out is required (or set " + std::string(kOutputEnv) + ")");
}

inline CollectionPlan load_plan(const std::optional<std::string>& plan_file, const std::optional<std::string>& preset) {
    if (plan_file && preset) throw UsageError("give either --plan or --preset, not both");
    if (plan_file) return plan_from_json(read_json_file(*plan_file));
    if (preset) return plan_from_json({{"preset", *preset}});
    throw UsageError("one of --plan or --preset is required");
}

inline void print_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

struct GenerateArgs {
    int level = 1;
    std::uint64_t seed = 0;
    std::string preset = "full";
    std::optional<std::size_t> frames, width, height;
    std::optional<std::string> out, id;
    bool supersample = false;
    bool quiet = false;
};

inline int run_generate(const GenerateArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
    VideoSpec spec = a.preset == "desk" ? VideoSpec::desk(a.level, a.seed) : VideoSpec::full(a.level, a.seed);
    if (a.frames) spec.frames = *a.frames;
    if (a.width) spec.width = *a.width;
    if (a.height) spec.height = *a.height;
    if (a.id) spec.video_id = *a.id;
    spec.supersample = a.supersample;
    spec.threads = threads;
    spec.validate();
    const fs::path dir = default_output(a.out, spec.id());
    const std::size_t step = std::max<std::size_t>(1, spec.frames / 10);
    const auto m = generate_video(spec, dir, [&](std::size_t i) {
        if (!a.quiet && ((i + 1) % step == 0 || i + 1 == spec.frames)) {
            err << "frame " << i + 1 << "/" << spec.frames << '\n';
        }
    });
    print_json(out, {{"video_id", m.video_id},
                     {"level", m.level},
                     {"seed", m.seed},
                     {"frame_count", m.frame_count()},
                     {"out", dir.string()},
                     {"manifest", (dir / kManifestFileName).string()}});
    return 0;
}

inline void print_split_table(std::ostream& err, const std::vector<SplitInput>& inputs, const SplitAssignment& a) {
    std::map<int, std::map<std::string, int>> n;
    for (const auto& v : inputs) ++n[v.level][a.tag.at(v.video_id)];
    err << "level  train  val  test  unused\n";
    for (const auto& [level, c] : n) {
        auto get = [&](const char* k) { return c.count(k) ? c.at(k) : 0; };
        err << std::setw(5) << level << std::setw(7) << get("train") << std::setw(5) << get("val") << std::setw(6)
            << get("test") << std::setw(8) << get("unused") << '\n';
    }
}

/// Entry point shared by the executable and the tests. JSON results go to
/// `out`, progress and human-readable tables to `err`.
/// Exit codes: 0 success, 1 runtime error, 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Synthetic colonoscopy generation, depth evaluation, loss and reconstruction", "colonsynth"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Cap on worker threads (0 = hardware concurrency)");

    // generate
    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Render one video: RGB/depth PNG pairs and a manifest");
    generate->add_option("--level", gen.level, "Level of detail")->check(CLI::Range(1, kLevelCount));
    generate->add_option("--seed", gen.seed, "Colon and camera seed");
    generate->add_option("--preset", gen.preset, "Defaults: full (5400 frames, 1280x1080) or desk (60 frames, 320x270)")
        ->check(CLI::IsMember({"full", "desk"}));
    generate->add_option("--frames", gen.frames, "Frame count")->check(CLI::PositiveNumber);
    generate->add_option("--width", gen.width, "Image width in pixels")->check(CLI::Range(2, 1 << 16));
    generate->add_option("--height", gen.height, "Image height in pixels")->check(CLI::Range(2, 1 << 16));
    generate->add_option("--out", gen.out, "Output directory (default $COLONSYNTH_OUT/<video id>)");
    generate->add_option("--id", gen.id, "Video id recorded in the manifest");
    generate->add_flag("--supersample", gen.supersample, "Render 2x2 samples per pixel");
    generate->add_flag("--quiet", gen.quiet, "No progress output");

    // collection
    std::optional<std::string> plan_file, plan_preset, coll_out;
    std::optional<std::uint64_t> coll_seed;
    bool dry_run = false;
    auto* collection = app.add_subcommand("collection", "Render a multi-level collection from a plan");
    collection->add_option("--plan", plan_file, "Plan JSON file")->check(CLI::ExistingFile);
    collection->add_option("--preset", plan_preset, "Built-in plan")->check(CLI::IsMember({"full", "desk"}));
    collection->add_option("--seed", coll_seed, "Collection seed (overrides the plan)");
    collection->add_option("--out", coll_out, "Output directory (default $COLONSYNTH_OUT)");
    collection->add_flag("--dry-run", dry_run, "Print the collection index without rendering");

    // split
    std::optional<std::string> split_index, split_plan, split_preset, split_out;
    std::string strategy_name;
    auto* split = app.add_subcommand("split", "Train/val/test assignment for a collection");
    split->add_option("--index", split_index, "collection.json of a rendered collection")->check(CLI::ExistingFile);
    split->add_option("--plan", split_plan, "Plan JSON file")->check(CLI::ExistingFile);
    split->add_option("--preset", split_preset, "Built-in plan")->check(CLI::IsMember({"full", "desk"}));
    split->add_option("--strategy", strategy_name, "cl (curriculum) or tl (traditional)")
        ->required()
        ->check(CLI::IsMember({"cl", "tl"}));
    split->add_option("--out", split_out, "Also write the split JSON here");

    // eval
    std::string eval_gt, eval_pred;
    bool eval_bins = false, eval_gamma = false;
    double eval_delta = 1.25;
    std::optional<std::string> eval_csv;
    auto* eval = app.add_subcommand("eval", "RMSE, threshold accuracy and per-depth-bin RMSE");
    eval->add_option("--gt", eval_gt, "Ground-truth depth file or directory")->required()->check(CLI::ExistingPath);
    eval->add_option("--pred", eval_pred, "Predicted depth file or directory")->required()->check(CLI::ExistingPath);
    eval->add_flag("--bins", eval_bins, "Add 1-cm depth bins over [0, 18)");
    eval->add_option("--csv", eval_csv, "Write the per-bin table as CSV (implies --bins)");
    eval->add_option("--delta", eval_delta, "Threshold accuracy ratio")->check(CLI::Range(1.0, 100.0));
    eval->add_flag("--gamma-encoded", eval_gamma, "Tensor inputs hold gamma-encoded depth; decode to cm first");

    // loss
    std::string loss_gt, loss_pred;
    double sigma = kDefaultLossSigma;
    std::vector<double> weights;
    std::optional<std::string> grad_out;
    auto* loss = app.add_subcommand("loss", "Depth, edge and curvature loss terms for one pair");
    loss->add_option("--gt", loss_gt, "Ground-truth depth (PNG or tensor)")->required()->check(CLI::ExistingFile);
    loss->add_option("--pred", loss_pred, "Predicted depth (PNG or tensor)")->required()->check(CLI::ExistingFile);
    loss->add_option("--sigma", sigma, "Gaussian scale of the curvature term, px")->check(CLI::PositiveNumber);
    loss->add_option("--w", weights, "Weights w1 w2 w3")->expected(3)->check(CLI::NonNegativeNumber);
    loss->add_option("--grad-out", grad_out, "Write d(total)/d(pred) as a tensor");

    // reconstruct
    std::string rec_depth, rec_intr;
    std::optional<std::string> rec_rgb, rec_out;
    bool surface = false, camera_marker = false;
    auto* reconstruct = app.add_subcommand("reconstruct", "Back-project a depth map to a PLY point cloud or surface");
    reconstruct->add_option("--depth", rec_depth, "Depth (PNG or tensor, cm)")->required()->check(CLI::ExistingFile);
    reconstruct->add_option("--intrinsics", rec_intr, "Manifest or {width, height, focal_px} JSON")
        ->required()
        ->check(CLI::ExistingFile);
    reconstruct->add_option("--rgb", rec_rgb, "RGB PNG for point colours")->check(CLI::ExistingFile);
    reconstruct->add_option("--out", rec_out, "Output .ply")->required();
    reconstruct->add_flag("--surface", surface, "Write a 2.5-D triangulated surface instead of points");
    reconstruct->add_flag("--camera", camera_marker, "Append a camera pyramid marker");

    // stats
    std::string stats_manifest;
    std::size_t stride = 1;
    auto* stats = app.add_subcommand("stats", "Length report, fold spacing and depth histograms of a video");
    stats->add_option("--manifest", stats_manifest, "Video manifest.json")->required()->check(CLI::ExistingFile);
    stats->add_option("--stride", stride, "Read every n-th depth frame")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        set_max_threads(threads);
        if (*generate) return run_generate(gen, threads, out, err);

        if (*collection) {
            CollectionPlan plan = load_plan(plan_file, plan_preset);
            if (coll_seed) plan.seed = *coll_seed;
            if (dry_run) {
                print_json(out, collection_index(plan, build_collection(plan)));
                return 0;
            }
            const fs::path dir = default_output(coll_out);
            const auto ms = render_collection(plan, dir, threads);
            print_json(out, {{"out", dir.string()},
                             {"video_count", ms.size()},
                             {"frame_count", plan.frame_count()},
                             {"index", (dir / kCollectionIndexName).string()}});
            return 0;
        }

        if (*split) {
            std::vector<SplitInput> inputs;
            if (split_index) {
                if (split_plan || split_preset) throw UsageError("give --index or a plan, not both");
                inputs = split_inputs(read_json_file(*split_index));
            } else {
                inputs = split_inputs(build_collection(load_plan(split_plan, split_preset)));
            }
            const auto a = split_collection(inputs, parse_split_strategy(strategy_name));
            const auto j = split_to_json(a);
            if (split_out) write_json_file(*split_out, j);
            print_split_table(err, inputs, a);
            print_json(out, j);
            return 0;
        }

        if (*eval) {
            const bool bins = eval_bins || eval_csv.has_value();
            MetricAccumulator acc(eval_delta, bins ? std::optional<BinSpec>(BinSpec{}) : std::nullopt);
            const bool gt_dir = fs::is_directory(eval_gt), pred_dir = fs::is_directory(eval_pred);
            if (gt_dir != pred_dir) throw UsageError("--gt and --pred must both be files or both be directories");
            if (gt_dir) {
                const auto files = depth_files(eval_gt);
                if (files.empty()) throw std::runtime_error("no depth files in " + eval_gt);
                for (const auto& f : files) {
                    acc.add(f.filename().string(), load_depth(f, eval_gamma),
                            load_depth(matching_prediction(eval_pred, f), eval_gamma));
                }
            } else {
                acc.add(fs::path(eval_gt).filename().string(), load_depth(eval_gt, eval_gamma),
                        load_depth(eval_pred, eval_gamma));
            }
            const auto summary = acc.summary();
            if (eval_csv) {
                std::ofstream csv(*eval_csv, std::ios::binary);
                if (!csv) throw std::runtime_error("cannot open " + *eval_csv + " for writing");
                csv << bins_csv(summary.bins);
            }
            err << std::fixed << std::setprecision(4);
            for (const auto& [name, r] : acc.frames()) err << name << "  rmse " << r.rmse << " cm  thacc " << r.thacc << " %\n";
            err << "mean  rmse " << summary.rmse << " cm  thacc " << summary.thacc << " %\n";
            print_json(out, to_json(acc));
            return 0;
        }

        if (*loss) {
            LossWeights w;
            if (!weights.empty()) w = {weights[0], weights[1], weights[2]};
            w.validate();
            const ImageD p = load_depth(loss_gt), d = load_depth(loss_pred);
            const auto k = make_gaussian_kernels(sigma);
            const auto l = loss_total(d, p, w, k);
            if (grad_out) write_tensor(*grad_out, loss_gradient(d, p, w, k));
            print_json(out, to_json(l, w, sigma));
            return 0;
        }

        if (*reconstruct) {
            const ImageD depth = load_depth(rec_depth);
            Intrinsics K = intrinsics_from_json(read_json_file(rec_intr));
            if (K.width != depth.width() || K.height != depth.height()) K = K.rescaled(depth.width(), depth.height());
            std::size_t written = 0;
            if (surface) {
                export_surface(depth, *rec_out);
                written = depth.size();
            } else {
                std::optional<RgbFrame> rgb;
                if (rec_rgb) rgb = read_png_rgb8(*rec_rgb);
                const auto cloud = backproject(depth, K, rgb ? &*rgb : nullptr);
                export_ply(cloud, *rec_out, camera_marker ? std::optional<Intrinsics>(K) : std::nullopt);
                written = cloud.size();
            }
            print_json(out, {{"out", *rec_out},
                             {"kind", surface ? "surface" : "points"},
                             {"vertices", written},
                             {"intrinsics", intrinsics_to_json(K)}});
            return 0;
        }

        if (*stats) {
            VideoStatsOptions opt;
            opt.frame_stride = stride;
            const auto j = video_stats(stats_manifest, opt);
            err << "centerline " << j["length"]["centerline_length_cm"].get<double>() << " cm, "
                << j["folds"]["count"].get<std::size_t>() << " folds, " << j["polyps"].get<std::size_t>() << " polyps\n";
            print_json(out, j);
            return 0;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace colonsynth::cli
