#include <gtest/gtest.h>
#include <png.h>

#include <qsr/error.hpp>
#include <qsr/image_io.hpp>

#include "test_support.hpp"

namespace qsr {
namespace {

using testing::TempDir;

void write_png(const std::filesystem::path& path, int w, int h, png_uint_32 format,
               const std::vector<std::uint8_t>& pixels) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(w);
    png.height = static_cast<png_uint_32>(h);
    png.format = format;
    ASSERT_TRUE(png_image_write_to_file(&png, path.c_str(), 0, pixels.data(), 0, nullptr));
}

TEST(LoadImage, BinaryPgm) {
    TempDir dir;
    testing::write_bytes(dir / "a.pgm", testing::pgm_bytes(2, 2, {0, 64, 128, 255}));
    const Image img = load_image(dir / "a.pgm");
    EXPECT_EQ(img, Image(2, 2, std::vector<double>{0, 64, 128, 255}));
}

TEST(LoadImage, PgmHeaderComments) {
    TempDir dir;
    testing::write_bytes(dir / "c.pgm", std::string("P5\n# comment\n2 1\n# another\n255\n") + "\x05\x06");
    EXPECT_EQ(load_image(dir / "c.pgm"), Image(2, 1, std::vector<double>{5, 6}));
}

TEST(LoadImage, WhitePpmPixel) {
    TempDir dir;
    testing::write_bytes(dir / "w.ppm", std::string("P6\n1 1\n255\n") + "\xff\xff\xff");
    EXPECT_EQ(load_image(dir / "w.ppm")(0, 0), 255.0);
}

TEST(LoadImage, PpmUsesLuma) {
    TempDir dir;
    testing::write_bytes(dir / "r.ppm", std::string("P6\n2 1\n255\n") + std::string("\xff\x00\x00\x00\xff\x00", 6));
    const Image img = load_image(dir / "r.ppm");
    EXPECT_EQ(img(0, 0), 76.0);
    EXPECT_EQ(img(1, 0), 150.0);
}

TEST(LoadImage, TruncatedPgmIsFormatError) {
    TempDir dir;
    testing::write_bytes(dir / "t.pgm", "P5\n4 4\n255\n\x01\x02");
    EXPECT_THROW((void)load_image(dir / "t.pgm"), FormatError);
    testing::write_bytes(dir / "h.pgm", "P5\n4");
    EXPECT_THROW((void)load_image(dir / "h.pgm"), FormatError);
}

TEST(LoadImage, MissingFileIsIoError) {
    TempDir dir;
    EXPECT_THROW((void)load_image(dir / "nope.pgm"), IoError);
}

TEST(LoadImage, SixteenBitPgmIsUnsupported) {
    TempDir dir;
    testing::write_bytes(dir / "d.pgm", std::string("P5\n1 1\n65535\n") + std::string("\x00\x01", 2));
    EXPECT_THROW((void)load_image(dir / "d.pgm"), UnsupportedFormatError);
}

TEST(LoadImage, UnknownMagicIsUnsupported) {
    TempDir dir;
    testing::write_bytes(dir / "x.bmp", "BM....");
    EXPECT_THROW((void)load_image(dir / "x.bmp"), UnsupportedFormatError);
}

TEST(LoadImage, GrayAndRgbPng) {
    TempDir dir;
    write_png(dir / "g.png", 3, 1, PNG_FORMAT_GRAY, {0, 100, 255});
    EXPECT_EQ(load_image(dir / "g.png"), Image(3, 1, std::vector<double>{0, 100, 255}));
    write_png(dir / "c.png", 2, 1, PNG_FORMAT_RGB, {255, 0, 0, 0, 255, 0});
    EXPECT_EQ(load_image(dir / "c.png"), Image(2, 1, std::vector<double>{76, 150}));
}

TEST(LoadImage, PngWithAlphaIsUnsupported) {
    TempDir dir;
    write_png(dir / "a.png", 1, 1, PNG_FORMAT_RGBA, {1, 2, 3, 4});
    EXPECT_THROW((void)load_image(dir / "a.png"), UnsupportedFormatError);
}

TEST(LoadImage, CorruptPngIsFormatError) {
    TempDir dir;
    write_png(dir / "g.png", 8, 8, PNG_FORMAT_GRAY, std::vector<std::uint8_t>(64, 9));
    std::string bytes = testing::read_bytes(dir / "g.png");
    testing::write_bytes(dir / "cut.png", bytes.substr(0, bytes.size() / 2));
    EXPECT_THROW((void)load_image(dir / "cut.png"), FormatError);
}

TEST(SaveImage, ClampsAndRounds) {
    TempDir dir;
    save_image(Image(3, 1, std::vector<double>{255.7, -3.2, 99.5}), dir / "o.pgm");
    EXPECT_EQ(load_image(dir / "o.pgm"), Image(3, 1, std::vector<double>{255, 0, 100}));
}

TEST(SaveImage, RoundTripIsByteIdentical) {
    TempDir dir;
    testing::Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const int w = rng.integer(1, 40);
        const int h = rng.integer(1, 40);
        std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
        for (auto& p : px) {
            p = static_cast<std::uint8_t>(rng.integer(0, 255));
        }
        const std::string original = testing::pgm_bytes(w, h, px);
        testing::write_bytes(dir / "in.pgm", original);
        save_image(load_image(dir / "in.pgm"), dir / "out.pgm");
        EXPECT_EQ(testing::read_bytes(dir / "out.pgm"), original);
    }
}

TEST(SaveImage, UnwritablePathIsIoError) {
    TempDir dir;
    EXPECT_THROW(save_image(Image(1, 1), dir / "missing" / "o.pgm"), IoError);
}

}  // namespace
}  // namespace qsr
