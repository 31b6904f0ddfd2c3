#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scrollbin/image.hpp"

namespace scrollbin::pnm {

enum class Encoding { Binary, Ascii };

/// Decodes P1..P6. PBM files come back as BinaryMask (1 = black = ink),
/// PGM as GrayImage and PPM as RgbImage. Only maxval 255 is accepted.
AnyImage decode(std::span<const std::uint8_t> bytes);
AnyImage read(const std::filesystem::path& path);

std::vector<std::uint8_t> encode(const AnyImage& image, Encoding encoding = Encoding::Binary);
void write(const AnyImage& image, const std::filesystem::path& path, Encoding encoding = Encoding::Binary);

// Typed readers; throw DataError when the file holds another image kind.
GrayImage read_gray(const std::filesystem::path& path);
RgbImage read_rgb(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

}  // namespace scrollbin::pnm
