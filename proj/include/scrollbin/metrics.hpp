#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scrollbin/image.hpp"

namespace scrollbin::metrics {

/// Pixel counts with ink as the positive class.
struct Confusion {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    bool operator==(const Confusion&) const = default;
};

Confusion confusion(const BinaryMask& pred, const BinaryMask& gt);

/// 2RP/(R+P). No positives anywhere scores 1; no true positives otherwise 0.
double f_measure(const Confusion& c);

/// Per-pixel weights derived from the ground truth. Recall weights lie in
/// [0, 1] on gt ink; precision weights lie in [1, 2] on background pixels
/// within one stroke width of gt ink and are 1 elsewhere.
struct PseudoWeights {
    std::vector<double> recall;
    std::vector<double> precision;
};

PseudoWeights pseudo_weights(const BinaryMask& gt);

double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt);
double pseudo_f_measure(const BinaryMask& pred, const BinaryMask& gt, const PseudoWeights& weights);

/// 10 log10(1 / MSE) on {0,1} masks; +inf for identical masks.
double psnr(const BinaryMask& pred, const BinaryMask& gt);

/// Normalized 5x5 reciprocal-distance matrix, rows then columns.
std::array<std::array<double, 5>, 5> drd_weights();

/// Count of grid-aligned 8x8 gt blocks (partial edge blocks included) holding
/// both ink and background.
std::uint64_t non_uniform_blocks(const BinaryMask& gt);

double drd(const BinaryMask& pred, const BinaryMask& gt);

struct Record {
    double f = 0, pf = 0, psnr = 0, drd = 0;
};

Record evaluate(const BinaryMask& pred, const BinaryMask& gt);

struct Report {
    std::vector<Record> records;
    Record mean;
    Record stddev;  // sample standard deviation, 0 for a single value
    std::uint64_t psnr_inf_count = 0;
};

/// Mean and sample std per metric. Non-finite values are left out of their
/// metric's aggregate; excluded PSNR values are counted.
Report aggregate(const std::vector<Record>& records);

// JSON with fixed key order; +inf is written as the string "inf".
std::string to_json(const Record& record);
std::string to_json(const Report& report, const std::vector<std::string>& pred_paths = {},
                    const std::vector<std::string>& gt_paths = {});

}  // namespace scrollbin::metrics
