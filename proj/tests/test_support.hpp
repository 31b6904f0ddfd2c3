#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "scrollbin/image.hpp"

namespace scrollbin::fixture {

inline GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
    GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

inline RgbImage random_rgb(std::mt19937_64& rng, int w, int h) {
    RgbImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density = 0.5) {
    BinaryMask m(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : m.ink) v = u(rng) < density;
    return m;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("scrollbin_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace scrollbin::fixture
