#pragma once

#include "scrollbin/image.hpp"

namespace scrollbin {

/// Stacks three co-registered band images into one pseudo-color image. The
/// usual assignment is 595 nm -> R, 924 nm -> G, 638 nm -> B, but any triple
/// of equally sized bands is accepted.
RgbImage fuse_bands(const GrayImage& band_r, const GrayImage& band_g, const GrayImage& band_b);

}  // namespace scrollbin
