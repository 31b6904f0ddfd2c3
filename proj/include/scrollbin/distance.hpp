#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scrollbin/image.hpp"

namespace scrollbin {

/// Exact squared Euclidean distance from every pixel to its nearest site,
/// plus that site's linear index (-1 and +inf when there are no sites).
struct FeatureTransform {
    int width = 0;
    int height = 0;
    std::vector<double> sq_dist;
    std::vector<std::int64_t> nearest;
};

FeatureTransform feature_transform(int width, int height, std::span<const std::uint8_t> sites);

/// 8-connected component labels of the ink pixels; background gets -1.
struct Components {
    int count = 0;
    std::vector<int> label;
};

Components label_components(const BinaryMask& mask);

}  // namespace scrollbin
