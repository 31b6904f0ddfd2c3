#pragma once

// Procedural document fixtures: handwriting-like strokes on a textured
// background, with the exact stroke mask as ground truth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "scrollbin/image.hpp"

namespace scrollbin::synthetic {

struct Page {
    GrayImage image;
    BinaryMask gt;
};

struct PageStyle {
    double background = 175;
    double texture = 12;      // amplitude of the fibre pattern
    double noise = 8;         // per-pixel uniform noise
    double ink = 60;
    double ink_noise = 10;
    double gradient = 0;      // left-to-right illumination change in gray levels
    double stroke_radius = 1.6;
    int line_spacing = 28;
};

inline void stamp(BinaryMask& m, double cx, double cy, double r) {
    const int x0 = static_cast<int>(std::floor(cx - r)), x1 = static_cast<int>(std::ceil(cx + r));
    const int y0 = static_cast<int>(std::floor(cy - r)), y1 = static_cast<int>(std::ceil(cy + r));
    for (int y = std::max(0, y0); y <= std::min(m.height - 1, y1); ++y)
        for (int x = std::max(0, x0); x <= std::min(m.width - 1, x1); ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
}

inline void stroke(BinaryMask& m, double ax, double ay, double bx, double by, double r) {
    const int steps = 1 + static_cast<int>(std::hypot(bx - ax, by - ay) * 2);
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        stamp(m, ax + t * (bx - ax), ay + t * (by - ay), r);
    }
}

inline Page make_page(int width, int height, std::uint64_t seed, const PageStyle& st = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Page p{GrayImage(width, height), BinaryMask(width, height)};

    // Rows of glyphs, each glyph a few random strokes inside a small cell.
    for (int base = st.line_spacing / 2 + 4; base + 8 < height; base += st.line_spacing) {
        int x = 4 + static_cast<int>(u(rng) * 8);
        while (x + 12 < width) {
            const double gw = 8 + u(rng) * 6, gh = 12 + u(rng) * 6;
            const int strokes = 1 + static_cast<int>(u(rng) * 3);
            for (int s = 0; s < strokes; ++s) {
                stroke(p.gt, x + u(rng) * gw, base - gh / 2 + u(rng) * gh, x + u(rng) * gw,
                       base - gh / 2 + u(rng) * gh, st.stroke_radius * (0.8 + 0.4 * u(rng)));
            }
            x += static_cast<int>(gw) + 3 + static_cast<int>(u(rng) * 5);
            if (u(rng) < 0.15) x += 10;  // word gap
        }
    }

    const double fx = 0.05 + u(rng) * 0.1, fy = 0.3 + u(rng) * 0.3, phase = u(rng) * 6.3;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double v = st.background + st.gradient * (static_cast<double>(x) / width - 0.5) +
                       st.texture * std::sin(fx * x + fy * y + phase) * std::sin(0.021 * x * y / (1 + y) + 0.13 * y) +
                       st.noise * (u(rng) * 2 - 1);
            if (p.gt.at(x, y)) v = st.ink + st.gradient * (static_cast<double>(x) / width - 0.5) + st.ink_noise * (u(rng) * 2 - 1);
            p.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    return p;
}

}  // namespace scrollbin::synthetic
