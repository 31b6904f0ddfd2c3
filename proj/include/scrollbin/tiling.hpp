#pragma once

#include <string>
#include <vector>

#include "scrollbin/image.hpp"

namespace scrollbin {

enum class PadMode { Replicate, Zero, White };

PadMode parse_pad_mode(const std::string& name);

/// Non-overlapping square tiles covering an image, row-major. Tiles on the
/// right and bottom edges are padded out to the full patch size.
template <typename Img>
struct PatchGrid {
    int patch_size = 256;
    int rows = 0;
    int cols = 0;
    int orig_width = 0;
    int orig_height = 0;
    std::vector<Img> patches;

    const Img& at(int row, int col) const { return patches[static_cast<std::size_t>(row) * cols + col]; }
    Img& at(int row, int col) { return patches[static_cast<std::size_t>(row) * cols + col]; }
};

inline int tile_count(int extent, int patch_size) { return (extent + patch_size - 1) / patch_size; }

template <typename Img>
PatchGrid<Img> split(const Img& img, int patch_size = 256, PadMode pad = PadMode::Replicate);

/// Inverse of split: drops padding and stitches tiles back at their origin.
template <typename Img>
Img reassemble(const PatchGrid<Img>& grid);

extern template PatchGrid<GrayImage> split(const GrayImage&, int, PadMode);
extern template PatchGrid<RgbImage> split(const RgbImage&, int, PadMode);
extern template PatchGrid<BinaryMask> split(const BinaryMask&, int, PadMode);
extern template GrayImage reassemble(const PatchGrid<GrayImage>&);
extern template RgbImage reassemble(const PatchGrid<RgbImage>&);
extern template BinaryMask reassemble(const PatchGrid<BinaryMask>&);

}  // namespace scrollbin
