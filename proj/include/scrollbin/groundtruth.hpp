#pragma once

#include <cstdint>

#include "scrollbin/image.hpp"

namespace scrollbin {

/// Thresholds for treating an annotated pixel as red.
struct RedRule {
    int r_min = 200;
    int g_max = 80;
    int b_max = 80;

    bool matches(std::uint8_t r, std::uint8_t g, std::uint8_t b) const { return r >= r_min && g <= g_max && b <= b_max; }
};

/// Red annotation strokes become ink; everything else is background.
BinaryMask extract_gt(const RgbImage& marked, const RedRule& rule = {});

}  // namespace scrollbin
