#include "scrollbin/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "scrollbin/binet.hpp"
#include "scrollbin/classical.hpp"
#include "scrollbin/dataset.hpp"
#include "scrollbin/fusion.hpp"
#include "scrollbin/groundtruth.hpp"
#include "scrollbin/imageops.hpp"
#include "scrollbin/metrics.hpp"
#include "scrollbin/pnm.hpp"
#include "scrollbin/tiling.hpp"

namespace scrollbin::cli {

namespace {

constexpr const char* kUsage =
    "usage: scrollbin <fuse|tile|untile|baseline|make-gt|train|binarize|evaluate|evaluate-set> [options]\n"
    "       scrollbin <subcommand> --help for the options of one subcommand\n";

std::string fixed(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

GrayImage gray_input(const std::string& path) {
    auto img = load_any_input(path);
    if (auto* c = std::get_if<RgbImage>(&img)) return to_grayscale(*c);
    return std::get<GrayImage>(img);
}

struct Options {
    // fuse
    std::string band_r, band_g, band_b;
    // shared
    std::string input, output, pad = "replicate";
    int threads = 1;
    // tile / untile
    int patch = 256;
    std::string dir;
    int width = 0, height = 0;
    // baseline
    std::string method;
    int window = 71;
    std::optional<double> k;
    double big_r = 128.0;
    // make-gt
    RedRule rule;
    // train
    std::string data, mode = "gray", init, history;
    int epochs = 200, batch = 1;
    double lr = 0.0002, holdout = 0.0;
    std::uint64_t seed = 42;
    bool no_dropout = false;
    // binarize / evaluate
    std::string model, pred, gt, pairs;
    bool json = false;
};

void add_threads(CLI::App* sub, Options& o) {
    sub->add_option("--threads", o.threads, "Worker threads")->envname("SCROLLBIN_THREADS")->check(CLI::PositiveNumber);
}

int run_fuse(const Options& o) {
    pnm::write(fuse_bands(pnm::read_gray(o.band_r), pnm::read_gray(o.band_g), pnm::read_gray(o.band_b)), o.output);
    return kExitOk;
}

int run_tile(const Options& o, std::ostream& err) {
    const auto pad = parse_pad_mode(o.pad);
    const std::filesystem::path dir(o.dir);
    std::filesystem::create_directories(dir);
    const auto img = pnm::read(o.input);
    std::size_t count = 0;
    std::visit(
        [&](const auto& im) {
            const auto grid = split(im, o.patch, pad);
            for (int r = 0; r < grid.rows; ++r)
                for (int c = 0; c < grid.cols; ++c) {
                    pnm::write(grid.at(r, c), dir / ("r" + std::to_string(r) + "_c" + std::to_string(c) + ".pnm"));
                    ++count;
                }
        },
        img);
    err << "wrote " << count << " patches to " << dir.string() << "\n";
    return kExitOk;
}

int run_untile(const Options& o) {
    if (o.width < 1 || o.height < 1) throw PreconditionError("--width and --height must be positive");
    const std::filesystem::path dir(o.dir);
    const auto first = pnm::read(dir / "r0_c0.pnm");
    std::visit(
        [&](const auto& proto) {
            using Img = std::decay_t<decltype(proto)>;
            if (proto.width != proto.height) throw ShapeError("patch r0_c0.pnm is not square");
            PatchGrid<Img> grid;
            grid.patch_size = proto.width;
            grid.orig_width = o.width;
            grid.orig_height = o.height;
            grid.rows = tile_count(o.height, grid.patch_size);
            grid.cols = tile_count(o.width, grid.patch_size);
            for (int r = 0; r < grid.rows; ++r)
                for (int c = 0; c < grid.cols; ++c) {
                    const auto name = "r" + std::to_string(r) + "_c" + std::to_string(c) + ".pnm";
                    auto img = pnm::read(dir / name);
                    auto* typed = std::get_if<Img>(&img);
                    if (!typed) throw DataError(name + " has a different image type than r0_c0.pnm");
                    grid.patches.push_back(std::move(*typed));
                }
            pnm::write(reassemble(grid), o.output);
        },
        first);
    return kExitOk;
}

int run_baseline(const Options& o) {
    const auto img = gray_input(o.input);
    BinaryMask mask;
    if (o.method == "otsu") {
        mask = classical::otsu_global(img).mask;
    } else if (o.method == "otsu-local") {
        mask = classical::otsu_local(img, o.window);
    } else if (o.method == "niblack") {
        mask = classical::niblack(img, o.window, o.k.value_or(-0.2));
    } else {
        mask = classical::sauvola(img, o.window, o.k.value_or(0.5), o.big_r);
    }
    pnm::write(mask, o.output);
    return kExitOk;
}

int run_make_gt(const Options& o) {
    pnm::write(extract_gt(pnm::read_rgb(o.input), o.rule), o.output);
    return kExitOk;
}

int run_train(const Options& o, std::ostream& err) {
    if (o.holdout < 0.0 || o.holdout >= 1.0) throw PreconditionError("--holdout must be in [0, 1)");
    const auto mode = parse_input_mode(o.mode);
    auto images = load_dataset(o.data, mode);
    const std::size_t held = static_cast<std::size_t>(std::ceil(o.holdout * images.size()));
    if (held >= images.size()) throw PreconditionError("--holdout leaves no training images");

    std::optional<binet::NetParams<float>> init;
    if (!o.init.empty()) init = binet::load_weights(o.init);
    const int patch = init ? init->input_size() : binet::Architecture::standard(input_channels(mode)).input_size();

    std::vector<binet::Sample> train_set, holdout_set;
    for (std::size_t i = 0; i < images.size(); ++i) {
        auto samples = make_samples(images[i].image, images[i].gt, patch);
        auto& dst = i < images.size() - held ? train_set : holdout_set;
        std::move(samples.begin(), samples.end(), std::back_inserter(dst));
    }
    err << "training on " << train_set.size() << " patches from " << images.size() - held << " images\n";

    binet::TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.lr = o.lr;
    cfg.seed = o.seed;
    cfg.batch_size = o.batch;
    cfg.dropout = !o.no_dropout;
    const auto result = binet::train(train_set, cfg, std::move(init), [&](const binet::EpochReport& r) {
        err << "epoch " << r.epoch << "/" << cfg.epochs << " loss " << fixed(r.loss) << " step " << r.step << "\n";
    });
    binet::save_weights(result.params, o.output);
    if (!o.history.empty()) {
        std::ofstream h(o.history);
        if (!h) throw IoError("cannot open " + o.history + " for writing");
        for (double l : result.loss_history) h << shortest(l) << "\n";
    }
    if (!holdout_set.empty()) err << "holdout loss " << fixed(binet::evaluate_loss(result.params, holdout_set)) << "\n";
    return kExitOk;
}

int run_binarize(const Options& o) {
    const auto params = binet::load_weights(o.model);
    const auto pad = parse_pad_mode(o.pad);
    auto img = load_any_input(o.input);
    BinaryMask mask;
    if (params.in_channels == 1) {
        if (auto* c = std::get_if<RgbImage>(&img)) img = to_grayscale(*c);
        mask = binet::binarize_image(params, std::get<GrayImage>(img), o.threads, pad);
    } else {
        const auto* c = std::get_if<RgbImage>(&img);
        if (!c) throw DataError("model expects a 3-channel (PPM) input");
        mask = binet::binarize_image(params, *c, o.threads, pad);
    }
    pnm::write(mask, o.output);
    return kExitOk;
}

void print_record(std::ostream& out, const metrics::Record& r) {
    out << "f=" << fixed(r.f) << " pf=" << fixed(r.pf) << " psnr=" << fixed(r.psnr) << " drd=" << fixed(r.drd);
}

int run_evaluate(const Options& o, std::ostream& out) {
    const auto r = metrics::evaluate(pnm::read_mask(o.pred), pnm::read_mask(o.gt));
    if (o.json) {
        out << metrics::to_json(r) << "\n";
    } else {
        print_record(out, r);
        out << "\n";
    }
    return kExitOk;
}

int run_evaluate_set(const Options& o, std::ostream& out) {
    const std::filesystem::path manifest(o.pairs);
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open " + o.pairs);
    const auto base = manifest.parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    std::vector<std::string> preds, gts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError(o.pairs + ":" + std::to_string(lineno) + ": expected pred<TAB>gt");
        preds.push_back(line.substr(0, tab));
        gts.push_back(line.substr(tab + 1));
    }
    if (preds.empty()) throw DataError(o.pairs + ": manifest lists no pairs");

    std::vector<metrics::Record> records(preds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < preds.size(); i = next++) {
            try {
                records[i] = metrics::evaluate(pnm::read_mask(resolve(preds[i])), pnm::read_mask(resolve(gts[i])));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const int workers = std::clamp(o.threads, 1, static_cast<int>(preds.size()));
        for (int t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);

    const auto report = metrics::aggregate(records);
    if (o.json) {
        out << metrics::to_json(report, preds, gts) << "\n";
        return kExitOk;
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out << preds[i] << "\t";
        print_record(out, records[i]);
        out << "\n";
    }
    out << "mean\t";
    print_record(out, report.mean);
    out << "\nstd\t";
    print_record(out, report.stddev);
    out << "\npsnr_inf_count\t" << report.psnr_inf_count << "\n";
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Document image binarization toolkit", "scrollbin"};
    app.require_subcommand(1, 1);
    Options o;

    auto* fuse = app.add_subcommand("fuse", "Stack three band images into a pseudo-color PPM");
    fuse->add_option("--r", o.band_r, "Band for the red channel (595 nm)")->required();
    fuse->add_option("--g", o.band_g, "Band for the green channel (924 nm)")->required();
    fuse->add_option("--b", o.band_b, "Band for the blue channel (638 nm)")->required();
    fuse->add_option("--out", o.output)->required();

    auto* tile = app.add_subcommand("tile", "Split an image into square patches r{row}_c{col}.pnm");
    tile->add_option("--input", o.input)->required();
    tile->add_option("--patch", o.patch)->check(CLI::PositiveNumber);
    tile->add_option("--outdir", o.dir)->required();
    tile->add_option("--pad", o.pad, "replicate|zero|white");

    auto* untile = app.add_subcommand("untile", "Reassemble patches into a WxH image");
    untile->add_option("--indir", o.dir)->required();
    untile->add_option("--width", o.width)->required();
    untile->add_option("--height", o.height)->required();
    untile->add_option("--out", o.output)->required();

    auto* baseline = app.add_subcommand("baseline", "Classical thresholding");
    baseline->add_option("--method", o.method)
        ->required()
        ->check(CLI::IsMember({"otsu", "otsu-local", "niblack", "sauvola"}));
    baseline->add_option("--input", o.input)->required();
    baseline->add_option("--out", o.output)->required();
    baseline->add_option("--window", o.window, "Local window (even sizes grow by one)");
    baseline->add_option("--k", o.k, "Niblack/Sauvola k (defaults -0.2 / 0.5)");
    baseline->add_option("--bigr", o.big_r, "Sauvola dynamic range R");

    auto* make_gt = app.add_subcommand("make-gt", "Convert a red-marked image into a ground-truth PBM");
    make_gt->add_option("--marked", o.input)->required();
    make_gt->add_option("--out", o.output)->required();
    make_gt->add_option("--rmin", o.rule.r_min);
    make_gt->add_option("--gmax", o.rule.g_max);
    make_gt->add_option("--bmax", o.rule.b_max);

    auto* train = app.add_subcommand("train", "Train the network on <stem>.pgm|ppm + <stem>.gt.pbm pairs");
    train->add_option("--data", o.data)->required();
    train->add_option("--mode", o.mode)->check(CLI::IsMember({"gray", "color", "fused"}));
    train->add_option("--epochs", o.epochs)->check(CLI::PositiveNumber);
    train->add_option("--lr", o.lr)->check(CLI::PositiveNumber);
    train->add_option("--seed", o.seed);
    train->add_option("--batch", o.batch)->check(CLI::PositiveNumber);
    train->add_option("--holdout", o.holdout, "Fraction of images held out for validation");
    train->add_option("--out", o.output)->required();
    train->add_option("--init", o.init, "Warm-start weights");
    train->add_option("--history", o.history, "Write the per-epoch loss history here");
    train->add_flag("--no-dropout", o.no_dropout);
    add_threads(train, o);

    auto* binarize = app.add_subcommand("binarize", "Binarize an image with trained weights");
    binarize->add_option("--model", o.model)->required();
    binarize->add_option("--input", o.input)->required();
    binarize->add_option("--out", o.output)->required();
    binarize->add_option("--pad", o.pad, "replicate|zero|white");
    add_threads(binarize, o);

    auto* evaluate = app.add_subcommand("evaluate", "Score a predicted mask against ground truth");
    evaluate->add_option("--pred", o.pred)->required();
    evaluate->add_option("--gt", o.gt)->required();
    evaluate->add_flag("--json", o.json);

    auto* evaluate_set = app.add_subcommand("evaluate-set", "Score pred<TAB>gt pairs listed in a manifest");
    evaluate_set->add_option("--pairs", o.pairs)->required();
    evaluate_set->add_flag("--json", o.json);
    add_threads(evaluate_set, o);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
        err << "error: " << e.what() << "\n" << kUsage;
        return kExitUsage;
    }

    try {
        if (fuse->parsed()) return run_fuse(o);
        if (tile->parsed()) return run_tile(o, err);
        if (untile->parsed()) return run_untile(o);
        if (baseline->parsed()) return run_baseline(o);
        if (make_gt->parsed()) return run_make_gt(o);
        if (train->parsed()) return run_train(o, err);
        if (binarize->parsed()) return run_binarize(o);
        if (evaluate->parsed()) return run_evaluate(o, out);
        if (evaluate_set->parsed()) return run_evaluate_set(o, out);
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    err << kUsage;
    return kExitUsage;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace scrollbin::cli
