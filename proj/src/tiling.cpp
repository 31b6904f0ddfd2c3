#include "scrollbin/tiling.hpp"

#include <algorithm>
#include <cstring>

namespace scrollbin {

PadMode parse_pad_mode(const std::string& name) {
    if (name == "replicate") return PadMode::Replicate;
    if (name == "zero") return PadMode::Zero;
    if (name == "white") return PadMode::White;
    throw PreconditionError("unknown padding mode '" + name + "' (replicate|zero|white)");
}

namespace {

// Uniform element access: GrayImage/RgbImage pixels and BinaryMask labels are
// all byte vectors with `channels` interleaved samples.
std::vector<std::uint8_t>& samples(GrayImage& i) { return i.data; }
std::vector<std::uint8_t>& samples(RgbImage& i) { return i.data; }
std::vector<std::uint8_t>& samples(BinaryMask& m) { return m.ink; }
const std::vector<std::uint8_t>& samples(const GrayImage& i) { return i.data; }
const std::vector<std::uint8_t>& samples(const RgbImage& i) { return i.data; }
const std::vector<std::uint8_t>& samples(const BinaryMask& m) { return m.ink; }

template <typename Img>
std::uint8_t fill_value(PadMode pad) {
    if constexpr (std::is_same_v<Img, BinaryMask>) {
        return 0;  // both zero and white padding mean background for masks
    } else {
        return pad == PadMode::White ? 255 : 0;
    }
}

}  // namespace

template <typename Img>
PatchGrid<Img> split(const Img& img, int patch_size, PadMode pad) {
    if (patch_size < 1) throw PreconditionError("patch size must be at least 1");
    constexpr int C = Img::channels;
    PatchGrid<Img> grid;
    grid.patch_size = patch_size;
    grid.orig_width = img.width;
    grid.orig_height = img.height;
    grid.rows = tile_count(img.height, patch_size);
    grid.cols = tile_count(img.width, patch_size);
    grid.patches.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);

    const auto& src = samples(img);
    const auto fill = fill_value<Img>(pad);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            Img tile(patch_size, patch_size);
            auto& dst = samples(tile);
            const int x0 = c * patch_size, y0 = r * patch_size;
            for (int y = 0; y < patch_size; ++y) {
                int sy = y0 + y;
                const bool pad_row = sy >= img.height;
                if (pad_row) sy = img.height - 1;
                for (int x = 0; x < patch_size; ++x) {
                    int sx = x0 + x;
                    const bool pad_col = sx >= img.width;
                    if (pad_col) sx = img.width - 1;
                    auto* out = &dst[(static_cast<std::size_t>(y) * patch_size + x) * C];
                    if ((pad_row || pad_col) && pad != PadMode::Replicate) {
                        std::fill(out, out + C, fill);
                    } else {
                        const auto* in = &src[(static_cast<std::size_t>(sy) * img.width + sx) * C];
                        std::copy(in, in + C, out);
                    }
                }
            }
            grid.patches.push_back(std::move(tile));
        }
    }
    return grid;
}

template <typename Img>
Img reassemble(const PatchGrid<Img>& grid) {
    constexpr int C = Img::channels;
    const int p = grid.patch_size;
    if (p < 1 || grid.rows != tile_count(grid.orig_height, p) || grid.cols != tile_count(grid.orig_width, p)) {
        throw ShapeError("patch grid rows/cols inconsistent with original size");
    }
    if (grid.patches.size() != static_cast<std::size_t>(grid.rows) * grid.cols) {
        throw ShapeError("patch grid holds " + std::to_string(grid.patches.size()) + " patches, expected " +
                         std::to_string(grid.rows * grid.cols));
    }
    Img out(grid.orig_width, grid.orig_height);
    auto& dst = samples(out);
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const Img& tile = grid.at(r, c);
            if (tile.width != p || tile.height != p) throw ShapeError("patch has wrong dimensions");
            const auto& src = samples(tile);
            const int x0 = c * p, y0 = r * p;
            const int w = std::min(p, grid.orig_width - x0);
            const int h = std::min(p, grid.orig_height - y0);
            for (int y = 0; y < h; ++y) {
                const auto* in = &src[static_cast<std::size_t>(y) * p * C];
                auto* o = &dst[(static_cast<std::size_t>(y0 + y) * grid.orig_width + x0) * C];
                std::copy(in, in + static_cast<std::size_t>(w) * C, o);
            }
        }
    }
    return out;
}

template PatchGrid<GrayImage> split(const GrayImage&, int, PadMode);
template PatchGrid<RgbImage> split(const RgbImage&, int, PadMode);
template PatchGrid<BinaryMask> split(const BinaryMask&, int, PadMode);
template GrayImage reassemble(const PatchGrid<GrayImage>&);
template RgbImage reassemble(const PatchGrid<RgbImage>&);
template BinaryMask reassemble(const PatchGrid<BinaryMask>&);

}  // namespace scrollbin
