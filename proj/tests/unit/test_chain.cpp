#include <gtest/gtest.h>

#include <qsr/cnn/model_io.hpp>
#include <qsr/error.hpp>
#include <qsr/metrics.hpp>
#include <qsr/pipeline/chain.hpp>

#include <cmath>

#include "test_support.hpp"

namespace qsr::pipeline {
namespace {

ChainConfig make(Sensor s, Reconstructor r, Refiner f = Refiner::None) {
    ChainConfig c;
    c.sensor = s;
    c.reconstructor = r;
    c.refiner = f;
    return c;
}

std::shared_ptr<const cnn::Network> zero_model(int depth = 3, int width = 4) {
    cnn::Network net = cnn::Network::create(depth, width, 0, cnn::Variant::VdsrQs);
    for (auto& l : net.layers()) {
        l.weights.setZero();
    }
    return std::make_shared<const cnn::Network>(std::move(net));
}

std::shared_ptr<const cnn::Network> random_model(std::uint64_t seed) {
    cnn::Network net = cnn::Network::create(4, 8, seed);
    qsr::testing::Rng rng(seed);
    for (auto& l : net.layers()) {
        for (Eigen::Index k = 0; k < l.bias.size(); ++k) {
            l.bias(k) = rng.uniform(-0.2, 0.2);
        }
    }
    return std::make_shared<const cnn::Network>(std::move(net));
}

TEST(Chain, NamesAndParsing) {
    EXPECT_EQ(make(Sensor::Quarter, Reconstructor::Fsr, Refiner::VdsrQs).name(), "quarter+fsr+vdsr-qs");
    EXPECT_EQ(make(Sensor::LowRes, Reconstructor::Bicubic).name(), "lowres+bicubic");
    EXPECT_EQ(parse_sensor("lowres"), Sensor::LowRes);
    EXPECT_EQ(parse_reconstructor("fsr"), Reconstructor::Fsr);
    EXPECT_EQ(parse_refiner("vdsr-qs"), Refiner::VdsrQs);
    EXPECT_THROW((void)parse_sensor("hires"), ValidationError);
    EXPECT_THROW((void)parse_reconstructor("nearest"), ValidationError);
    EXPECT_THROW((void)parse_refiner("srgan"), ValidationError);
}

TEST(Chain, InvalidCombinations) {
    EXPECT_THROW(validate(make(Sensor::LowRes, Reconstructor::Fsr)), ValidationError);
    EXPECT_THROW(validate(make(Sensor::Quarter, Reconstructor::Bicubic)), ValidationError);
    EXPECT_THROW(validate(make(Sensor::LowRes, Reconstructor::Bicubic, Refiner::VdsrQs)), ValidationError);
    EXPECT_NO_THROW(validate(make(Sensor::LowRes, Reconstructor::Bicubic, Refiner::Vdsr)));
    EXPECT_NO_THROW(validate(make(Sensor::Quarter, Reconstructor::Fsr, Refiner::Vdsr)));
}

TEST(Chain, MissingModel) {
    const Image f(8, 8, 5.0);
    EXPECT_THROW((void)run_chain(f, make(Sensor::Quarter, Reconstructor::Fsr, Refiner::Vdsr)), ValidationError);
    auto c = make(Sensor::Quarter, Reconstructor::Fsr, Refiner::Vdsr);
    c.model_path = "/nonexistent/model.bin";
    EXPECT_THROW((void)run_chain(f, c), IoError);
}

TEST(Chain, QuarterFsrOnConstant) {
    const Image f(64, 48, 120.0);
    const ChainOutput out = run_chain(f, make(Sensor::Quarter, Reconstructor::Fsr));
    ASSERT_TRUE(out.mask.has_value());
    EXPECT_EQ(out.mask->count(), 64u * 48u / 4u);
    for (double v : out.output.samples()) {
        EXPECT_NEAR(v, 120.0, 1e-3);
    }
    EXPECT_TRUE(std::isinf(psnr(quantized(out.output), f)));
}

TEST(Chain, ZeroModelVdsrQsReturnsFirstStage) {
    const Image f = qsr::testing::urban_image(48, 48, 1);
    auto c = make(Sensor::Quarter, Reconstructor::Fsr, Refiner::VdsrQs);
    c.model = zero_model();
    const ChainOutput out = run_chain(f, c);
    EXPECT_EQ(out.output, out.intermediate);
}

TEST(Chain, LowresStripesCollapse) {
    const Image stripes = qsr::testing::stripes_image(32, 32);
    const ChainOutput out = run_chain(stripes, make(Sensor::LowRes, Reconstructor::Bicubic));
    for (double v : out.output.samples()) {
        EXPECT_NEAR(v, 127.5, 1e-9);
    }
    EXPECT_NEAR(psnr(out.output, stripes), 20.0 * std::log10(255.0 / 127.5), 1e-9);
    EXPECT_NEAR(psnr(out.output, stripes), 6.02, 0.005);
    EXPECT_FALSE(out.mask.has_value());
}

TEST(Chain, VdsrQsPreservesMeasuredReferencePixels) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Image f = qsr::testing::urban_image(56, 40, seed);
        auto c = make(Sensor::Quarter, Reconstructor::Fsr, Refiner::VdsrQs);
        c.model = random_model(seed);
        c.base_mask = generate_random_qs_mask(32, seed);
        c.shift = {3, 5};
        const ChainOutput out = run_chain(f, c);
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 56; ++x) {
                if ((*out.mask)(x, y)) {
                    ASSERT_EQ(out.output(x, y), f(x, y));
                }
            }
        }
    }
}

TEST(Chain, ModelLoadedFromFile) {
    qsr::testing::TempDir dir;
    cnn::save_model(*zero_model(), dir / "m.bin");
    auto c = make(Sensor::LowRes, Reconstructor::Bicubic, Refiner::Vdsr);
    c.model_path = dir / "m.bin";
    const Image f = qsr::testing::urban_image(32, 32, 2);
    const ChainOutput out = run_chain(f, c);
    EXPECT_EQ(out.output, clamped(out.intermediate));
}

TEST(Chain, ShiftThenTileMask) {
    auto c = make(Sensor::Quarter, Reconstructor::Fsr);
    c.base_mask = generate_random_qs_mask(32, 4);
    c.shift = {5, 9};
    const SamplingMask m = chain_mask(c, 70, 40);
    const SamplingMask shifted = shift_mask(c.base_mask, 5, 9);
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 70; ++x) {
            EXPECT_EQ(m(x, y), shifted(x % 32, y % 32));
            EXPECT_EQ(m(x, y), c.base_mask(((x - 5) % 32 + 32) % 32, ((y - 9) % 32 + 32) % 32));
        }
    }
}

TEST(Chain, OddReferenceRejected) {
    EXPECT_THROW((void)run_chain(Image(9, 8), make(Sensor::Quarter, Reconstructor::Fsr)), DimensionError);
}

TEST(TrainingSet, ShiftCountMultipliesSamples) {
    std::vector<NamedImage> images = {{"a", qsr::testing::urban_image(64, 64, 1)},
                                      {"b", qsr::testing::urban_image(64, 64, 2)}};
    const auto c = make(Sensor::Quarter, Reconstructor::Fsr);
    const auto one = make_training_set(images, c, 1);
    ASSERT_EQ(one.size(), 2u);
    for (int n : {2, 4, 8}) {
        EXPECT_EQ(make_training_set(images, c, n).size(), 2u * static_cast<std::size_t>(n));
    }
    const auto four = make_training_set(images, c, 4);
    EXPECT_EQ(four[0].reconstruction, one[0].reconstruction);
    ChainConfig second = c;
    second.shift = augmentation_shifts(4)[1];
    EXPECT_EQ(*four[1].mask, chain_mask(second, 64, 64));
    EXPECT_NE(*four[1].mask, *four[0].mask);
    EXPECT_EQ(four[4].reference, images[1].image);
    EXPECT_THROW((void)make_training_set(images, c, 3), ValidationError);
    EXPECT_THROW((void)make_training_set(images, make(Sensor::LowRes, Reconstructor::Bicubic), 2), ValidationError);
    EXPECT_EQ(make_training_set(images, make(Sensor::LowRes, Reconstructor::Bicubic), 1).size(), 2u);
}

TEST(Evaluate, RowsMeansAndDeterminism) {
    std::vector<NamedImage> images = {{"z.pgm", qsr::testing::urban_image(48, 48, 5)},
                                      {"a.pgm", qsr::testing::urban_image(48, 48, 6)}};
    const std::vector<NamedChain> chains = {{"fsr", make(Sensor::Quarter, Reconstructor::Fsr)},
                                            {"fsr-again", make(Sensor::Quarter, Reconstructor::Fsr)},
                                            {"bic", make(Sensor::LowRes, Reconstructor::Bicubic)}};
    const EvalReport r = evaluate_dataset(images, chains, 0, "synthetic");
    EXPECT_EQ(r.dataset, "synthetic");
    EXPECT_EQ(r.chains, (std::vector<std::string>{"fsr", "fsr-again", "bic"}));
    ASSERT_EQ(r.rows.size(), 6u);
    EXPECT_EQ(r.rows[0].image, "a.pgm");
    EXPECT_EQ(r.rows[1].image, "z.pgm");
    EXPECT_EQ(r.rows[0].psnr, r.rows[2].psnr);
    EXPECT_EQ(r.rows[1].ssim, r.rows[3].ssim);
    ASSERT_EQ(r.means.size(), 3u);
    for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_EQ(r.means[c].image, "MEAN");
        const double p = (r.rows[2 * c].psnr + r.rows[2 * c + 1].psnr) / 2.0;
        const double s = (r.rows[2 * c].ssim + r.rows[2 * c + 1].ssim) / 2.0;
        EXPECT_EQ(r.means[c].psnr, p);
        EXPECT_EQ(r.means[c].ssim, s);
    }
    const EvalReport again = evaluate_dataset(images, chains, 0, "synthetic");
    EXPECT_EQ(again.means[2].psnr, r.means[2].psnr);
}

TEST(Evaluate, EchoesConfiguration) {
    std::vector<NamedImage> images = {{"c", Image(32, 32, 77.0)}};
    auto quarter = make(Sensor::Quarter, Reconstructor::Fsr);
    quarter.fsr.rho = 0.6;
    quarter.shift = {3, 1};
    const std::vector<NamedChain> chains = {{"q", quarter}, {"b", make(Sensor::LowRes, Reconstructor::Bicubic)}};
    const EvalReport r = evaluate_dataset(images, chains, 2);
    ASSERT_EQ(r.config.size(), 3u);
    EXPECT_EQ(r.config[0], "border-crop = 2");
    EXPECT_EQ(r.config[1].rfind("q: sensor=quarter recon=fsr refine=none mask=32x32:", 0), 0u) << r.config[1];
    EXPECT_NE(r.config[1].find("shift=3,1"), std::string::npos);
    EXPECT_NE(r.config[1].find("fsr.rho=0.6"), std::string::npos);
    EXPECT_EQ(r.config[2], "b: sensor=lowres recon=bicubic refine=none");
    auto other = quarter;
    other.base_mask = generate_random_qs_mask(32, 99);
    EXPECT_NE(other.describe(), quarter.describe());
}

TEST(Evaluate, BorderCropAndInfiniteMean) {
    std::vector<NamedImage> images = {{"c", Image(32, 32, 77.0)}};
    const std::vector<NamedChain> chains = {{"bic", make(Sensor::LowRes, Reconstructor::Bicubic)}};
    const EvalReport r = evaluate_dataset(images, chains, 4);
    EXPECT_TRUE(std::isinf(r.means[0].psnr));
    EXPECT_NEAR(r.means[0].ssim, 1.0, 1e-12);
}

TEST(Evaluate, ErrorsNameTheImage) {
    std::vector<NamedImage> images = {{"tiny.pgm", Image(4, 4, 1.0)}};
    const std::vector<NamedChain> chains = {{"bic", make(Sensor::LowRes, Reconstructor::Bicubic)}};
    try {
        (void)evaluate_dataset(images, chains);
        FAIL() << "expected an error";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("tiny.pgm"), std::string::npos);
    }
    EXPECT_THROW((void)evaluate_dataset({}, chains), ValidationError);
}

}  // namespace
}  // namespace qsr::pipeline
