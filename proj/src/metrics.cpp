#include "scrollbin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "scrollbin/distance.hpp"

namespace scrollbin::metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double combine(double recall_num, double recall_den, double precision_num, double precision_den) {
    if (recall_den == 0.0 && precision_den == 0.0) return 1.0;
    if (recall_num == 0.0 || precision_num == 0.0) return 0.0;
    const double r = recall_num / recall_den;
    const double p = precision_num / precision_den;
    return 2.0 * r * p / (r + p);
}

}  // namespace

Confusion confusion(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred, gt, "confusion");
    Confusion c;
    for (std::size_t i = 0; i < gt.ink.size(); ++i) {
        const bool p = pred.ink[i], g = gt.ink[i];
        if (p && g) ++c.tp;
        else if (p) ++c.fp;
        else if (g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f_measure(const Confusion& c) {
    return combine(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn), static_cast<double>(c.tp),
                   static_cast<double>(c.tp + c.fp));
}

PseudoWeights pseudo_weights(const BinaryMask& gt) {
    const std::size_t n = gt.size();
    PseudoWeights w{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
    const auto comps = label_components(gt);
    if (comps.count == 0) return w;

    std::vector<std::uint8_t> background(n);
    for (std::size_t i = 0; i < n; ++i) background[i] = !gt.ink[i];
    const auto to_bg = feature_transform(gt.width, gt.height, background);

    // Half stroke width of a component = its largest distance to background.
    std::vector<double> half_width(comps.count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (gt.ink[i]) half_width[comps.label[i]] = std::max(half_width[comps.label[i]], std::sqrt(to_bg.sq_dist[i]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!gt.ink[i]) continue;
        const double hw = half_width[comps.label[i]];
        w.recall[i] = std::isfinite(hw) ? std::clamp(std::sqrt(to_bg.sq_dist[i]) / hw, 0.0, 1.0) : 1.0;
    }

    const auto to_ink = feature_transform(gt.width, gt.height, gt.ink);
    for (std::size_t i = 0; i < n; ++i) {
        if (gt.ink[i]) continue;
        const double stroke = 2.0 * half_width[comps.label[static_cast<std::size_t>(to_ink.nearest[i])]];
        const double d = std::sqrt(to_ink.sq_dist[i]);
        if (d <= stroke) w.precision[i] = std::clamp(2.0 - d / stroke, 1.0, 2.0);
    }
    return w;
}

double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt, const PseudoWeights& weights) {
    require_same_size(pred, gt, "pseudo_f_measure");
    if (weights.recall.size() != gt.size() || weights.precision.size() != gt.size()) {
        throw ShapeError("pseudo_f_measure: weight maps do not match the image");
    }
    double tp_r = 0, gt_r = 0, tp_p = 0, pred_p = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const bool p = pred.ink[i], g = gt.ink[i];
        if (g) gt_r += weights.recall[i];
        if (p) pred_p += weights.precision[i];
        if (p && g) {
            tp_r += weights.recall[i];
            tp_p += weights.precision[i];
        }
    }
    return combine(tp_r, gt_r, tp_p, pred_p);
}

double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred, gt, "pseudo_f_measure");
    return pseudo_f_measure(pred, gt, pseudo_weights(gt));
}

double psnr(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred, gt, "psnr");
    std::uint64_t flips = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) flips += pred.ink[i] != gt.ink[i];
    if (flips == 0) return kInf;
    const double mse = static_cast<double>(flips) / static_cast<double>(gt.size());
    return 10.0 * std::log10(1.0 / mse);
}

std::array<std::array<double, 5>, 5> drd_weights() {
    std::array<std::array<double, 5>, 5> w{};
    double total = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i == 2 && j == 2) continue;
            w[i][j] = 1.0 / std::sqrt(double((i - 2) * (i - 2) + (j - 2) * (j - 2)));
            total += w[i][j];
        }
    for (auto& row : w)
        for (auto& v : row) v /= total;
    return w;
}

std::uint64_t non_uniform_blocks(const BinaryMask& gt) {
    std::uint64_t count = 0;
    for (int by = 0; by < gt.height; by += 8) {
        for (int bx = 0; bx < gt.width; bx += 8) {
            bool ink = false, bg = false;
            for (int y = by; y < std::min(by + 8, gt.height); ++y)
                for (int x = bx; x < std::min(bx + 8, gt.width); ++x) (gt.at(x, y) ? ink : bg) = true;
            count += ink && bg;
        }
    }
    return count;
}

double drd(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred, gt, "drd");
    const auto w = drd_weights();
    double total = 0.0;
    std::uint64_t flipped = 0;
    for (int y = 0; y < gt.height; ++y) {
        for (int x = 0; x < gt.width; ++x) {
            const bool g = pred.at(x, y);
            if (g == gt.at(x, y)) continue;
            ++flipped;
            for (int i = 0; i < 5; ++i) {
                const int ny = y + i - 2;
                if (ny < 0 || ny >= gt.height) continue;
                for (int j = 0; j < 5; ++j) {
                    const int nx = x + j - 2;
                    if (nx < 0 || nx >= gt.width) continue;
                    if (gt.at(nx, ny) != g) total += w[i][j];
                }
            }
        }
    }
    if (flipped == 0) return 0.0;
    const auto nubn = non_uniform_blocks(gt);
    if (nubn == 0) return kInf;
    return total / static_cast<double>(nubn);
}

Record evaluate(const BinaryMask& pred, const BinaryMask& gt) {
    require_same_size(pred, gt, "evaluate");
    return {f_measure(confusion(pred, gt)), pseudo_f_measure(pred, gt), psnr(pred, gt), drd(pred, gt)};
}

Report aggregate(const std::vector<Record>& records) {
    if (records.empty()) throw PreconditionError("cannot aggregate an empty record list");
    Report rep;
    rep.records = records;
    const auto fold = [&](double Record::*field, std::uint64_t* excluded) {
        std::vector<double> v;
        for (const auto& r : records) {
            if (std::isfinite(r.*field)) v.push_back(r.*field);
            else if (excluded) ++*excluded;
        }
        if (v.empty()) {
            rep.mean.*field = records.front().*field;
            rep.stddev.*field = 0.0;
            return;
        }
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        rep.mean.*field = mean;
        rep.stddev.*field = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    };
    fold(&Record::f, nullptr);
    fold(&Record::pf, nullptr);
    fold(&Record::psnr, &rep.psnr_inf_count);
    fold(&Record::drd, nullptr);
    return rep;
}

namespace {

nlohmann::ordered_json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

nlohmann::ordered_json record_json(const Record& r) {
    nlohmann::ordered_json j;
    j["f"] = number(r.f);
    j["pf"] = number(r.pf);
    j["psnr"] = number(r.psnr);
    j["drd"] = number(r.drd);
    return j;
}

}  // namespace

std::string to_json(const Record& record) { return record_json(record).dump(); }

std::string to_json(const Report& report, const std::vector<std::string>& pred_paths,
                    const std::vector<std::string>& gt_paths) {
    nlohmann::ordered_json j;
    auto images = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        nlohmann::ordered_json item;
        if (i < pred_paths.size()) item["pred"] = pred_paths[i];
        if (i < gt_paths.size()) item["gt"] = gt_paths[i];
        const auto rec = record_json(report.records[i]);
        for (auto& [k, v] : rec.items()) item[k] = v;
        images.push_back(std::move(item));
    }
    j["images"] = std::move(images);
    j["mean"] = record_json(report.mean);
    j["std"] = record_json(report.stddev);
    j["psnr_inf_count"] = report.psnr_inf_count;
    return j.dump();
}

}  // namespace scrollbin::metrics
