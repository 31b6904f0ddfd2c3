#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "scrollbin/binet.hpp"
#include "scrollbin/image.hpp"
#include "scrollbin/tiling.hpp"

namespace scrollbin {

/// Which image the network sees: a single band, visible-light color, or a
/// fused band triple (3 channels, stored as PPM).
enum class InputMode { Gray, Color, Fused };

InputMode parse_input_mode(const std::string& name);
int input_channels(InputMode mode);

using InputImage = std::variant<GrayImage, RgbImage>;

/// Reads a PGM/PPM and converts it to what `mode` expects (PPM -> luma for
/// gray mode). A PGM given to a 3-channel mode is a DataError.
InputImage load_input(const std::filesystem::path& path, InputMode mode);

/// Reads any PGM/PPM without conversion.
InputImage load_any_input(const std::filesystem::path& path);

struct LabeledImage {
    std::string stem;
    InputImage image;
    BinaryMask gt;
};

/// Pairs `<stem>.pgm|ppm` with `<stem>.gt.pbm`, sorted by stem.
std::vector<LabeledImage> load_dataset(const std::filesystem::path& dir, InputMode mode);

/// Tiles image and ground truth on the same grid.
std::vector<binet::Sample> make_samples(const InputImage& image, const BinaryMask& gt, int patch_size,
                                        PadMode pad = PadMode::Replicate);

}  // namespace scrollbin
