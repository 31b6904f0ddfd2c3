#include "scrollbin/fusion.hpp"

namespace scrollbin {

RgbImage fuse_bands(const GrayImage& band_r, const GrayImage& band_g, const GrayImage& band_b) {
    require_same_size(band_r, band_g, "fuse_bands: band_g");
    require_same_size(band_r, band_b, "fuse_bands: band_b");
    RgbImage out(band_r.width, band_r.height);
    for (std::size_t i = 0; i < band_r.data.size(); ++i) {
        out.data[3 * i] = band_r.data[i];
        out.data[3 * i + 1] = band_g.data[i];
        out.data[3 * i + 2] = band_b.data[i];
    }
    return out;
}

}  // namespace scrollbin
