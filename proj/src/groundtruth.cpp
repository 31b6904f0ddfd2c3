#include "scrollbin/groundtruth.hpp"

namespace scrollbin {

BinaryMask extract_gt(const RgbImage& marked, const RedRule& rule) {
    BinaryMask out(marked.width, marked.height);
    for (std::size_t i = 0; i < out.ink.size(); ++i) {
        out.ink[i] = rule.matches(marked.data[3 * i], marked.data[3 * i + 1], marked.data[3 * i + 2]);
    }
    return out;
}

}  // namespace scrollbin
