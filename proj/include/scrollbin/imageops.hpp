#pragma once

#include "scrollbin/image.hpp"

namespace scrollbin {

/// BT.601 luma, round(0.299R + 0.587G + 0.114B).
GrayImage to_grayscale(const RgbImage& img);

GrayImage extract_channel(const RgbImage& img, int channel);

/// Bilinear resampling with half-pixel centers. Output dimensions are
/// round(dim * scale); a zero-sized result is a ShapeError.
GrayImage resize_bilinear(const GrayImage& img, double scale);
RgbImage resize_bilinear(const RgbImage& img, double scale);

}  // namespace scrollbin
