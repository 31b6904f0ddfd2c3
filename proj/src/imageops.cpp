#include "scrollbin/imageops.hpp"

#include <algorithm>
#include <cmath>

namespace scrollbin {

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double luma = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] + 0.114 * img.data[3 * i + 2];
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
    }
    return out;
}

GrayImage extract_channel(const RgbImage& img, int channel) {
    if (channel < 0 || channel > 2) throw PreconditionError("channel index must be 0, 1 or 2");
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = img.data[3 * i + channel];
    return out;
}

namespace {

int scaled_dim(int dim, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("resize scale must be positive");
    const double d = std::round(dim * scale);
    if (d < 1.0) throw ShapeError("resize would produce a zero-sized image");
    return static_cast<int>(d);
}

struct Tap {
    int lo, hi;
    double frac;
};

// Source sample positions for each destination index along one axis.
std::vector<Tap> taps(int src, int dst) {
    std::vector<Tap> t(dst);
    const double ratio = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * ratio - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        t[i] = {lo, hi, s - lo};
    }
    return t;
}

template <typename Img>
Img resize_impl(const Img& img, double scale) {
    constexpr int C = Img::channels;
    const int ow = scaled_dim(img.width, scale);
    const int oh = scaled_dim(img.height, scale);
    if (ow == img.width && oh == img.height) return img;
    const auto tx = taps(img.width, ow);
    const auto ty = taps(img.height, oh);
    Img out(ow, oh);
    const auto px = [&](int x, int y, int c) -> double {
        return img.data[(static_cast<std::size_t>(y) * img.width + x) * C + c];
    };
    for (int y = 0; y < oh; ++y) {
        const auto& ay = ty[y];
        for (int x = 0; x < ow; ++x) {
            const auto& ax = tx[x];
            for (int c = 0; c < C; ++c) {
                const double top = px(ax.lo, ay.lo, c) * (1 - ax.frac) + px(ax.hi, ay.lo, c) * ax.frac;
                const double bot = px(ax.lo, ay.hi, c) * (1 - ax.frac) + px(ax.hi, ay.hi, c) * ax.frac;
                const double v = top * (1 - ay.frac) + bot * ay.frac;
                out.data[(static_cast<std::size_t>(y) * ow + x) * C + c] =
                    static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& img, double scale) { return resize_impl(img, scale); }
RgbImage resize_bilinear(const RgbImage& img, double scale) { return resize_impl(img, scale); }

}  // namespace scrollbin
