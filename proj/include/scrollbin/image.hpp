#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "scrollbin/error.hpp"

namespace scrollbin {

namespace detail {
inline void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw ShapeError("image dimensions must be at least 1x1, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
}
}  // namespace detail

/// 8-bit single channel raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static constexpr int channels = 1;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        detail::check_dims(w, h);
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }
    GrayImage(int w, int h, std::vector<std::uint8_t> pixels) : width(w), height(h), data(std::move(pixels)) {
        detail::check_dims(w, h);
        if (data.size() != static_cast<std::size_t>(w) * h) throw ShapeError("GrayImage data length mismatch");
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const GrayImage&) const = default;
};

/// 8-bit interleaved R,G,B raster, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    static constexpr int channels = 3;

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        detail::check_dims(w, h);
        data.assign(static_cast<std::size_t>(w) * h * 3, fill);
    }
    RgbImage(int w, int h, std::vector<std::uint8_t> pixels) : width(w), height(h), data(std::move(pixels)) {
        detail::check_dims(w, h);
        if (data.size() != static_cast<std::size_t>(w) * h * 3) throw ShapeError("RgbImage data length mismatch");
    }

    std::uint8_t& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    std::uint8_t at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool operator==(const RgbImage&) const = default;
};

/// Per-pixel ink labels. A nonzero entry is ink (foreground); this polarity
/// holds everywhere in the library. PBM value 1 (black) maps to ink.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ink;

    static constexpr int channels = 1;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false) : width(w), height(h) {
        detail::check_dims(w, h);
        ink.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
    }
    BinaryMask(int w, int h, std::vector<std::uint8_t> labels) : width(w), height(h), ink(std::move(labels)) {
        detail::check_dims(w, h);
        if (ink.size() != static_cast<std::size_t>(w) * h) throw ShapeError("BinaryMask data length mismatch");
        for (auto& v : ink) v = v ? 1 : 0;
    }

    bool at(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { ink[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t size() const { return ink.size(); }
    std::size_t ink_count() const {
        std::size_t n = 0;
        for (auto v : ink) n += v;
        return n;
    }

    bool operator==(const BinaryMask&) const = default;
};

using AnyImage = std::variant<GrayImage, RgbImage, BinaryMask>;

template <typename A, typename B>
void require_same_size(const A& a, const B& b, const char* what) {
    if (a.width != b.width || a.height != b.height) {
        throw ShapeError(std::string(what) + ": dimension mismatch " + std::to_string(a.width) + "x" +
                         std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
    }
}

}  // namespace scrollbin
