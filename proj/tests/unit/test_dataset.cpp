#include <gtest/gtest.h>

#include <qsr/error.hpp>
#include <qsr/image_io.hpp>
#include <qsr/pipeline/dataset.hpp>

#include "test_support.hpp"

namespace qsr::pipeline {
namespace {

TEST(Dataset, LexicographicOrderAndEvenCrop) {
    qsr::testing::TempDir dir;
    save_image(Image(4, 4, 30.0), dir / "c.pgm");
    save_image(Image(6, 2, 10.0), dir / "a.pgm");
    save_image(Image(101, 200, 20.0), dir / "b.pgm");
    const Dataset d = ingest_dataset(dir.path());
    ASSERT_EQ(d.images.size(), 3u);
    EXPECT_EQ(d.images[0].name, "a.pgm");
    EXPECT_EQ(d.images[1].name, "b.pgm");
    EXPECT_EQ(d.images[2].name, "c.pgm");
    EXPECT_EQ(d.images[1].image.width(), 100);
    EXPECT_EQ(d.images[1].image.height(), 200);
    EXPECT_TRUE(d.skipped.empty());
}

TEST(Dataset, SkipsUnreadableAndHiddenFiles) {
    qsr::testing::TempDir dir;
    save_image(Image(4, 4, 1.0), dir / "good.pgm");
    qsr::testing::write_bytes(dir / "notes.txt", "hello");
    qsr::testing::write_bytes(dir / "broken.pgm", "P5\n9 9\n255\n");
    save_image(Image(4, 4, 1.0), dir / ".hidden.pgm");
    std::filesystem::create_directory(dir / "sub");
    const Dataset d = ingest_dataset(dir.path());
    ASSERT_EQ(d.images.size(), 1u);
    EXPECT_EQ(d.skipped, (std::vector<std::string>{"broken.pgm", "notes.txt"}));
}

TEST(Dataset, Errors) {
    qsr::testing::TempDir dir;
    EXPECT_THROW((void)ingest_dataset(dir.path()), ValidationError);
    EXPECT_THROW((void)ingest_dataset(dir / "missing"), IoError);
}

}  // namespace
}  // namespace qsr::pipeline
