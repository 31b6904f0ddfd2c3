// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "scrollbin/binet.hpp"
#include "scrollbin/classical.hpp"
#include "scrollbin/metrics.hpp"
#include "scrollbin/pnm.hpp"
#include "scrollbin/tiling.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

using namespace scrollbin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome tiling() {
    std::mt19937_64 rng(1);
    const auto img = fixture::random_gray(rng, 2706, 3608);
    const auto grid = split(img, 256);
    const bool same = reassemble(grid) == img;
    return {grid.patches.size() == 165 && same, fmt("%zu patches, reassembly %s", grid.patches.size(), same ? "identical" : "differs")};
}

Outcome shape_ladder() {
    auto net = binet::build_model(1, 42);
    std::mt19937_64 g(2);
    const auto x = binet::normalize_input(fixture::random_gray(g, 256, 256));
    Rng rng(42);
    binet::ForwardTrace<float> trace;
    const auto y = binet::forward_train(net, x, rng, trace);
    std::vector<int> got, want{128, 64, 32, 16, 8, 4, 2, 1, 2, 4, 8, 16, 32, 64, 128, 256};
    for (const auto& e : trace.encoder) got.push_back(e.output.shape.h == e.output.shape.w ? e.output.shape.h : -1);
    for (const auto& d : trace.decoder) got.push_back(d.output.shape.h == d.output.shape.w ? d.output.shape.h : -1);
    bool in_range = true;
    for (float v : y.data) in_range = in_range && v > -1.0f && v < 1.0f;
    std::string ladder;
    for (int s : got) ladder += std::to_string(s) + " ";
    const bool ok = got == want && y.shape == nn::Shape{1, 1, 256, 256} && in_range;
    return {ok, "resolutions " + ladder + "output " + y.shape.str() + (in_range ? " in (-1,1)" : " out of range")};
}

Outcome gradients() {
    double worst_op = 0;
    std::string worst_name;
    const std::pair<const char*, double (*)(std::uint64_t)> ops[] = {
        {"conv", [](std::uint64_t s) { return gradcheck::check_conv(s); }},
        {"deconv", [](std::uint64_t s) { return gradcheck::check_deconv(s); }},
        {"batchnorm", [](std::uint64_t s) { return gradcheck::check_batchnorm(s); }},
        {"leaky_relu", gradcheck::check_leaky_relu},
        {"tanh", gradcheck::check_tanh},
        {"l1", gradcheck::check_l1},
        {"dropout", gradcheck::check_dropout},
        {"concat", gradcheck::check_concat},
    };
    for (const auto& [name, check] : ops)
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const double e = check(seed);
            if (e >= worst_op) {
                worst_op = e;
                worst_name = name;
            }
        }
    double worst_net = 0;
    std::size_t checked = 0, skipped = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = gradcheck::end_to_end(seed);
        worst_net = std::max(worst_net, r.params_error);
        checked += r.checked;
        skipped += r.skipped;
    }
    const bool ok = worst_op < 1e-3 && worst_net < 1e-2 && checked > 0;
    return {ok, fmt("worst per-op %.2e (%s) < 1e-3; end-to-end %.2e < 1e-2 over %zu coords (%zu at kinks skipped)",
                    worst_op, worst_name.c_str(), worst_net, checked, skipped)};
}

std::vector<synthetic::Page> text_patches(std::uint64_t first_seed, int count) {
    std::vector<synthetic::Page> pages;
    for (int i = 0; i < count; ++i) pages.push_back(synthetic::make_page(256, 256, first_seed + i));
    return pages;
}

std::vector<binet::Sample> samples_of(const std::vector<synthetic::Page>& pages) {
    std::vector<binet::Sample> out;
    for (const auto& p : pages) out.push_back({binet::normalize_input(p.image), binet::mask_to_target(p.gt)});
    return out;
}

// Criterion 4's trained model doubles as the checkpoint for criterion 8.
std::optional<binet::NetParams<float>> overfit_model;

Outcome overfit() {
    const auto pages = text_patches(100, 4);
    binet::TrainConfig cfg;  // batch 1, lr 2e-4, beta1 0.5, dropout on
    cfg.epochs = 75;         // 4 patches -> 300 steps
    auto r = binet::train(samples_of(pages), cfg);
    double sum = 0, worst = 1;
    for (const auto& p : pages) {
        const double f = metrics::evaluate(binet::binarize_image(r.params, p.image), p.gt).f;
        sum += f;
        worst = std::min(worst, f);
    }
    const double mean = sum / pages.size();
    const std::uint64_t steps = r.params.step;
    overfit_model = std::move(r.params);
    return {mean >= 0.90 && steps == 300,
            fmt("%llu steps, final loss %.4f, train-set F mean %.4f (min %.4f) >= 0.90", (unsigned long long)steps,
                r.loss_history.back(), mean, worst)};
}

Outcome metric_oracles() {
    std::mt19937_64 rng(5);
    int f_bad = 0, psnr_bad = 0, drd_bad = 0;
    double psnr_err = 0, drd_err = 0;
    for (int i = 0; i < 1000; ++i) {
        const int w = 1 + static_cast<int>(rng() % 32), h = 1 + static_cast<int>(rng() % 32);
        const auto gt = fixture::random_mask(rng, w, h, 0.05 + 0.9 * (rng() % 100) / 100.0);
        BinaryMask pred = gt;
        const int mode = static_cast<int>(rng() % 3);
        if (mode == 0) pred = fixture::random_mask(rng, w, h, 0.3);
        else
            for (auto& v : pred.ink)
                if (rng() % (mode == 1 ? 20 : 4) == 0) v ^= 1;
        if (metrics::f_measure(metrics::confusion(pred, gt)) != oracle::f_measure(pred, gt)) ++f_bad;
        const double p = metrics::psnr(pred, gt), po = oracle::psnr(pred, gt);
        if (std::isinf(po) ? !std::isinf(p) : !(std::abs(p - po) <= 1e-9)) ++psnr_bad;
        else if (!std::isinf(po)) psnr_err = std::max(psnr_err, std::abs(p - po));
        const double d = metrics::drd(pred, gt), dor = oracle::drd(pred, gt);
        if (std::isinf(dor) ? !std::isinf(d) : !(std::abs(d - dor) <= 1e-9)) ++drd_bad;
        else if (!std::isinf(dor)) drd_err = std::max(drd_err, std::abs(d - dor));
    }
    BinaryMask gt(16, 16);
    auto one = gt;
    one.ink[100] = 1;
    const double closed = metrics::psnr(one, gt);
    const bool ok = f_bad == 0 && psnr_bad == 0 && drd_bad == 0 && std::abs(closed - 24.082) <= 1e-3;
    return {ok, fmt("1000 pairs: F mismatches %d, PSNR mismatches %d (max err %.1e), DRD mismatches %d (max err %.1e); "
                    "1 flip in 16x16 = %.4f dB",
                    f_bad, psnr_bad, psnr_err, drd_bad, drd_err, closed)};
}

Outcome otsu_oracle() {
    std::mt19937_64 rng(6);
    int mismatches = 0;
    for (int i = 0; i < 500; ++i) {
        const int w = 1 + static_cast<int>(rng() % 64), h = 1 + static_cast<int>(rng() % 64);
        auto img = fixture::random_gray(rng, w, h);
        const int levels = 1 + static_cast<int>(rng() % 4);
        if (i % 3 == 1)
            for (auto& v : img.data) v = static_cast<std::uint8_t>(v % levels * 60 + 10);
        if (i % 3 == 2)
            for (auto& v : img.data) v = static_cast<std::uint8_t>((v & 1) ? 40 + v % 30 : 170 + v % 50);
        const int want = oracle::otsu_threshold(img.data);
        const int got = classical::otsu_threshold(classical::histogram(img));
        mismatches += got != want;
    }
    return {mismatches == 0, fmt("500 images, %d threshold mismatches", mismatches)};
}

Outcome baseline_ordering() {
    // Low contrast strokes under a strong left-to-right illumination falloff.
    synthetic::PageStyle style;
    style.background = 140;
    style.ink = 105;
    style.ink_noise = 6;
    style.texture = 10;
    style.noise = 6;
    style.gradient = 160;
    const auto page = synthetic::make_page(512, 384, 7, style);
    const double global = metrics::f_measure(metrics::confusion(classical::otsu_global(page.image).mask, page.gt));
    const double local = metrics::f_measure(metrics::confusion(classical::otsu_local(page.image, 70), page.gt));
    return {local > global, fmt("local Otsu F %.4f > global Otsu F %.4f", local, global)};
}

Outcome warm_start() {
    if (!overfit_model) {
        binet::TrainConfig pre;
        pre.epochs = 20;
        overfit_model = binet::train(samples_of(text_patches(100, 4)), pre).params;
    }
    const auto dir = fixture::scratch_dir("acceptance_warm");
    binet::save_weights(*overfit_model, dir / "checkpoint.bnet");
    const auto init = binet::load_weights(dir / "checkpoint.bnet");
    fs::remove_all(dir);

    // A new small labeled set, as in transfer to an unseen manuscript.
    const auto data = samples_of(text_patches(500, 4));
    binet::TrainConfig cfg;
    cfg.epochs = 1;
    const auto fresh = binet::train(data, cfg);
    const auto warm = binet::train(data, cfg, init);
    const bool ok = warm.loss_history[0] < fresh.loss_history[0] && warm.params.step == init.step + 4;
    return {ok, fmt("first-epoch loss warm %.4f < fresh %.4f; step counter %llu -> %llu", warm.loss_history[0],
                    fresh.loss_history[0], (unsigned long long)init.step, (unsigned long long)warm.params.step)};
}

Outcome serialization() {
    binet::Architecture arch = binet::Architecture::standard(1);
    arch.bottleneck_norm = true;
    auto net = binet::build_model<float>(arch, 9);
    std::mt19937_64 rng(9);
    // Arbitrary finite bit patterns, so every mantissa bit has to survive.
    auto noise = [&] { return std::bit_cast<float>(static_cast<std::uint32_t>(rng()) & 0xBFFFFFFFu); };
    for (auto* p : net.parameters())
        for (auto& v : p->value.data) v = noise();
    for (auto& st : net.encoder)
        if (st.norm) {
            for (auto& v : st.norm->running_mean.data) v = noise();
            for (auto& v : st.norm->running_var.data) v = std::abs(noise());
        }
    net.step = 987654321;
    const auto dir = fixture::scratch_dir("acceptance_weights");
    binet::save_weights(net, dir / "w.bnet");
    const auto back = binet::load_weights(dir / "w.bnet");
    const bool identical = back == net && back.step == net.step && binet::encode_weights(back) == binet::encode_weights(net);
    const auto bytes = slurp(dir / "w.bnet");
    fs::remove_all(dir);

    std::vector<std::uint8_t> file(bytes.begin(), bytes.end());
    auto bad_magic = file, bad_version = file;
    bad_magic[1] = 'X';
    bad_version[4] = 2;
    std::string magic_result = "accepted", version_result = "accepted";
    try {
        binet::decode_weights(bad_magic);
    } catch (const VersionError&) {
        magic_result = "VersionError";
    } catch (const FormatError&) {
        magic_result = "FormatError";
    }
    try {
        binet::decode_weights(bad_version);
    } catch (const VersionError&) {
        version_result = "VersionError";
    } catch (const FormatError&) {
        version_result = "FormatError";
    }
    const bool ok = identical && magic_result == "FormatError" && version_result == "VersionError";
    return {ok, fmt("%zu parameters round-trip %s; bad magic -> %s, version 2 -> %s", net.parameter_count(),
                    identical ? "bit-identical" : "DIFFERENT", magic_result.c_str(), version_result.c_str())};
}

Outcome determinism() {
    const auto dir = fixture::scratch_dir("acceptance_determinism");
    fs::create_directories(dir / "data");
    for (int i = 0; i < 2; ++i) {
        const auto page = synthetic::make_page(300, 256, 40 + i);
        pnm::write(page.image, dir / "data" / ("p" + std::to_string(i) + ".pgm"));
        pnm::write(page.gt, dir / "data" / ("p" + std::to_string(i) + ".gt.pbm"));
    }
    auto train = [&](const std::string& tag) {
        const std::string cmd = std::string(SCROLLBIN_CLI_PATH) + " train --data " + (dir / "data").string() +
                                " --epochs 2 --seed 7 --out " + (dir / (tag + ".bnet")).string() + " --history " +
                                (dir / (tag + ".txt")).string() + " 2> " + (dir / (tag + ".log")).string();
        return std::system(cmd.c_str());
    };
    const int a = train("a"), b = train("b");
    const auto wa = slurp(dir / "a.bnet"), wb = slurp(dir / "b.bnet");
    const auto ha = slurp(dir / "a.txt"), hb = slurp(dir / "b.txt");
    fs::remove_all(dir);
    const bool ok = a == 0 && b == 0 && !wa.empty() && wa == wb && !ha.empty() && ha == hb;
    return {ok, fmt("exit %d/%d; weights %zu bytes %s; histories %s", a, b, wa.size(), wa == wb ? "identical" : "differ",
                    ha == hb ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "tiling arithmetic", 1, tiling},
        {2, "architecture shape ladder", 10, shape_ladder},
        {3, "gradient correctness", 120, gradients},
        {4, "overfit smoke test", 900, overfit},
        {5, "metric oracles", 60, metric_oracles},
        {6, "Otsu oracle", 30, otsu_oracle},
        {7, "classical baseline ordering", 60, baseline_ordering},
        {8, "transfer-learning warm start", 300, warm_start},
        {9, "serialization round-trip", 10, serialization},
        {10, "determinism", 600, determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s criterion %d (%s): %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASSED" : (std::to_string(failures) + " CRITERIA FAILED").c_str());
    return failures == 0 ? 0 : 1;
}
