#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scrollbin/image.hpp"

namespace scrollbin::classical {

// Every method labels darker pixels as ink: a pixel is ink iff value <= T.

struct OtsuResult {
    int threshold = 0;
    BinaryMask mask;
};

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayImage& img);

/// Threshold maximizing between-class variance; ties go to the smallest t.
/// Returns -1 when every split has zero variance (single populated bin).
int otsu_threshold(const Histogram& hist);

/// Global Otsu. A constant image yields threshold 0 and an all-background mask.
OtsuResult otsu_global(const GrayImage& img);

/// Otsu on the edge-clamped window centered at each pixel. Even windows are
/// widened by one so the window stays centered. Single-valued windows are
/// background.
BinaryMask otsu_local(const GrayImage& img, int window = 71);

/// Mean and population standard deviation over edge-clamped windows,
/// computed from integral images of the sum and sum of squares.
struct LocalStats {
    int width = 0;
    int height = 0;
    std::vector<double> mean;
    std::vector<double> stddev;
};

LocalStats local_stats(const GrayImage& img, int window);

/// T = m + k*s.
BinaryMask niblack(const GrayImage& img, int window = 71, double k = -0.2);

/// T = m * (1 + k*(s/R - 1)).
BinaryMask sauvola(const GrayImage& img, int window = 71, double k = 0.5, double dynamic_range = 128.0);

int snap_window(int window);

}  // namespace scrollbin::classical
