#include <gtest/gtest.h>

#include <qsr/error.hpp>
#include <qsr/pipeline/config.hpp>

#include "test_support.hpp"

namespace qsr::pipeline {
namespace {

TEST(Config, ParsesKeysCommentsAndBlanks) {
    const auto c = KeyValueConfig::parse(
        "# header\n\nfsr.rho = 0.6\nfsr.iterations=50  # trailing\n  eval.border-crop =  4 \r\nname = a b\n");
    EXPECT_EQ(c.get_double("fsr.rho", 0.7), 0.6);
    EXPECT_EQ(c.get_int("fsr.iterations", 100), 50);
    EXPECT_EQ(c.get_int("eval.border-crop", 0), 4);
    EXPECT_EQ(c.get_string("name", ""), "a b");
    EXPECT_EQ(c.get_int("missing", 7), 7);
    EXPECT_FALSE(c.contains("missing"));
}

TEST(Config, LaterValuesWin) {
    auto c = KeyValueConfig::parse("a = 1\na = 2\n");
    EXPECT_EQ(c.get_int("a", 0), 2);
    c.set("a", "3");
    EXPECT_EQ(c.get_int("a", 0), 3);
}

TEST(Config, TypedParseErrors) {
    const auto c = KeyValueConfig::parse("n = 12x\nd = abc\nb = maybe\nt = yes\n");
    EXPECT_THROW((void)c.get_int("n", 0), ValidationError);
    EXPECT_THROW((void)c.get_double("d", 0.0), ValidationError);
    EXPECT_THROW((void)c.get_bool("b", false), ValidationError);
    EXPECT_TRUE(c.get_bool("t", false));
}

TEST(Config, MalformedLines) {
    EXPECT_THROW((void)KeyValueConfig::parse("just words\n"), FormatError);
    EXPECT_THROW((void)KeyValueConfig::parse(" = 3\n"), FormatError);
}

TEST(Config, UnknownKeysSorted) {
    const auto c = KeyValueConfig::parse("z = 1\nfsr.rho = 0.5\na = 2\n");
    EXPECT_EQ(c.unknown_keys({"fsr.rho"}), (std::vector<std::string>{"a", "z"}));
}

TEST(Config, LoadFromFile) {
    qsr::testing::TempDir dir;
    qsr::testing::write_bytes(dir / "c.cfg", "train.epochs = 3\n");
    EXPECT_EQ(KeyValueConfig::load(dir / "c.cfg").get_int("train.epochs", 0), 3);
    EXPECT_THROW((void)KeyValueConfig::load(dir / "none.cfg"), IoError);
}

}  // namespace
}  // namespace qsr::pipeline
