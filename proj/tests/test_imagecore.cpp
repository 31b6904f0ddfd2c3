#include <gtest/gtest.h>

#include <cstring>

#include "scrollbin/imageops.hpp"
#include "scrollbin/pnm.hpp"
#include "test_support.hpp"

using namespace scrollbin;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Pnm, SmallestAsciiPgm) {
    const auto img = std::get<GrayImage>(pnm::decode(bytes_of("P2 2 1 255 0 255")));
    EXPECT_EQ(img.width, 2);
    EXPECT_EQ(img.height, 1);
    EXPECT_EQ(img.data, (std::vector<std::uint8_t>{0, 255}));
}

TEST(Pnm, AsciiPbmValueOneIsInk) {
    const auto m = std::get<BinaryMask>(pnm::decode(bytes_of("P1 2 2 1 0 0 1")));
    EXPECT_TRUE(m.at(0, 0));
    EXPECT_FALSE(m.at(1, 0));
    EXPECT_FALSE(m.at(0, 1));
    EXPECT_TRUE(m.at(1, 1));
    EXPECT_EQ(m.ink_count(), 2u);
}

TEST(Pnm, AsciiPbmWithoutSeparators) {
    const auto m = std::get<BinaryMask>(pnm::decode(bytes_of("P1\n3 1\n101\n")));
    EXPECT_EQ(m.ink, (std::vector<std::uint8_t>{1, 0, 1}));
}

TEST(Pnm, CommentsInHeader) {
    const auto img = std::get<GrayImage>(pnm::decode(bytes_of("P5\n# made by hand\n1 1\n# maxval next\n255\n\x07")));
    EXPECT_EQ(img.data[0], 7);
}

TEST(Pnm, GrayEncodesToExactBytes) {
    const auto bytes = pnm::encode(GrayImage(1, 1, std::uint8_t{7}));
    EXPECT_EQ(std::string(bytes.begin(), bytes.end()), std::string("P5\n1 1\n255\n\x07"));
}

TEST(Pnm, AllInkMaskPayloadBitsAreOnes) {
    const BinaryMask m(8, 2, true);
    const auto bytes = pnm::encode(m);
    const std::string header = "P4\n8 2\n";
    ASSERT_EQ(bytes.size(), header.size() + 2);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + header.size()), header);
    EXPECT_EQ(bytes[header.size()], 0xFF);
    EXPECT_EQ(bytes[header.size() + 1], 0xFF);
}

TEST(Pnm, PbmRowsArePaddedToBytes) {
    BinaryMask m(10, 1);
    m.set(0, 0, true);
    m.set(9, 0, true);
    const auto bytes = pnm::encode(m);
    ASSERT_EQ(bytes.size(), std::string("P4\n10 1\n").size() + 2);
    EXPECT_EQ(bytes[bytes.size() - 2], 0x80);
    EXPECT_EQ(bytes[bytes.size() - 1], 0x40);
}

TEST(Pnm, RoundTripIsIdentityForEveryTypeAndEncoding) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
        for (auto enc : {pnm::Encoding::Binary, pnm::Encoding::Ascii}) {
            const AnyImage imgs[] = {fixture::random_gray(rng, w, h), fixture::random_rgb(rng, w, h),
                                     fixture::random_mask(rng, w, h)};
            for (const auto& img : imgs) {
                EXPECT_EQ(pnm::decode(pnm::encode(img, enc)), img) << "trial " << trial;
            }
        }
    }
}

TEST(Pnm, RoundTripThroughFiles) {
    const auto dir = fixture::scratch_dir("pnm");
    std::mt19937_64 rng(3);
    const auto img = fixture::random_rgb(rng, 17, 5);
    pnm::write(img, dir / "a.ppm");
    EXPECT_EQ(pnm::read_rgb(dir / "a.ppm"), img);
    EXPECT_THROW(pnm::read_gray(dir / "a.ppm"), DataError);
    std::filesystem::remove_all(dir);
}

TEST(Pnm, RejectsBadMagic) {
    EXPECT_THROW(pnm::decode(bytes_of("P7 1 1 255 0")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("")), DecodeError);
}

TEST(Pnm, RejectsOtherMaxvalAndNamesOffset) {
    try {
        pnm::decode(bytes_of("P5 1 1 65535\n\x01\x02"));
        FAIL() << "expected DecodeError";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.offset(), 6u);
        EXPECT_NE(std::string(e.what()).find("maxval"), std::string::npos);
    }
}

TEST(Pnm, RejectsTruncatedPayload) {
    EXPECT_THROW(pnm::decode(bytes_of("P5 2 2 255\nabc")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("P6 1 1 255\nab")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("P4 9 1\n\x01")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("P2 2 2 255 1 2 3")), DecodeError);
}

TEST(Pnm, RejectsMalformedHeader) {
    EXPECT_THROW(pnm::decode(bytes_of("P5 x 1 255\n")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("P5 0 1 255\n")), DecodeError);
    EXPECT_THROW(pnm::decode(bytes_of("P2 1 1 255 300")), DecodeError);
}

TEST(Grayscale, KnownValues) {
    RgbImage img(3, 1);
    const std::uint8_t px[] = {255, 255, 255, 255, 0, 0, 0, 255, 0};
    std::memcpy(img.data.data(), px, sizeof px);
    const auto g = to_grayscale(img);
    EXPECT_EQ(g.data[0], 255);
    EXPECT_EQ(g.data[1], 76);   // round(0.299 * 255)
    EXPECT_EQ(g.data[2], 150);  // round(0.587 * 255)
}

TEST(Grayscale, GrayPixelsAreFixedPoints) {
    RgbImage img(256, 1);
    for (int v = 0; v < 256; ++v)
        for (int c = 0; c < 3; ++c) img.at(v, 0, c) = static_cast<std::uint8_t>(v);
    const auto g = to_grayscale(img);
    for (int v = 0; v < 256; ++v) EXPECT_EQ(g.data[v], v);
}

TEST(Resize, HalvesFragmentDimensions) {
    const GrayImage img(5412, 7216, std::uint8_t{90});
    const auto out = resize_bilinear(img, 0.5);
    EXPECT_EQ(out.width, 2706);
    EXPECT_EQ(out.height, 3608);
    EXPECT_EQ(out.data.front(), 90);
}

TEST(Resize, UnitScaleIsIdentity) {
    std::mt19937_64 rng(11);
    const auto g = fixture::random_gray(rng, 31, 17);
    const auto c = fixture::random_rgb(rng, 9, 23);
    EXPECT_EQ(resize_bilinear(g, 1.0), g);
    EXPECT_EQ(resize_bilinear(c, 1.0), c);
}

TEST(Resize, ConstantStaysConstant) {
    for (double scale : {0.13, 0.5, 0.77, 1.5, 3.0}) {
        for (int v : {0, 1, 128, 254, 255}) {
            const auto out = resize_bilinear(GrayImage(37, 29, static_cast<std::uint8_t>(v)), scale);
            for (auto p : out.data) ASSERT_EQ(p, v) << "scale " << scale;
        }
    }
}

TEST(Resize, HalfScaleAveragesPairs) {
    // With half-pixel centers a 2:1 downscale samples exactly between source pixels.
    GrayImage img(4, 1, std::vector<std::uint8_t>{0, 100, 200, 250});
    const auto out = resize_bilinear(img, 0.5);
    ASSERT_EQ(out.width, 2);
    EXPECT_EQ(out.data[0], 50);
    EXPECT_EQ(out.data[1], 225);
}

TEST(Resize, RejectsZeroSizedOutput) {
    EXPECT_THROW(resize_bilinear(GrayImage(3, 3), 0.1), ShapeError);
    EXPECT_THROW(resize_bilinear(GrayImage(3, 3), 0.0), PreconditionError);
    EXPECT_THROW(resize_bilinear(GrayImage(3, 3), -1.0), PreconditionError);
}

TEST(ImageTypes, RejectEmptyAndMismatchedBuffers) {
    EXPECT_THROW(GrayImage(0, 4), ShapeError);
    EXPECT_THROW(GrayImage(2, 2, std::vector<std::uint8_t>(3)), ShapeError);
    EXPECT_THROW(RgbImage(2, 2, std::vector<std::uint8_t>(4)), ShapeError);
    EXPECT_THROW(BinaryMask(2, 2, std::vector<std::uint8_t>(5)), ShapeError);
}
