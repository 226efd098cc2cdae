#include <gtest/gtest.h>

#include <qsr/metrics.hpp>
#include <qsr/resample.hpp>
#include <qsr/sensor.hpp>

#include "test_support.hpp"

namespace qsr {
namespace {

TEST(CubicKernel, KnownValues) {
    EXPECT_DOUBLE_EQ(cubic_kernel(0.0), 1.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(1.0), 0.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(2.0), 0.0);
    EXPECT_DOUBLE_EQ(cubic_kernel(0.5), 0.5625);
    EXPECT_DOUBLE_EQ(cubic_kernel(1.5), -0.0625);
    EXPECT_DOUBLE_EQ(cubic_kernel(-0.5), cubic_kernel(0.5));
}

TEST(CubicKernel, PartitionOfUnity) {
    for (double f = 0.0; f < 1.0; f += 0.03125) {
        double s = 0.0;
        for (int k = -1; k <= 2; ++k) {
            s += cubic_kernel(f - k);
        }
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
}

TEST(Bicubic, DoublesTheSize) {
    const Image out = bicubic_upscale_x2(Image(5, 3, 1.0));
    EXPECT_EQ(out.width(), 10);
    EXPECT_EQ(out.height(), 6);
}

TEST(Bicubic, ConstantStaysConstant) {
    testing::Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = rng.uniform(0.0, 255.0);
        const Image out = bicubic_upscale_x2(Image(rng.integer(1, 12), rng.integer(1, 12), c));
        for (double v : out.samples()) {
            EXPECT_NEAR(v, c, 1e-9);
        }
    }
}

TEST(Bicubic, ReproducesLinearRampInInterior) {
    const int w = 16;
    Image ramp(w, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < w; ++x) {
            ramp(x, y) = 3.0 + 7.5 * x;
        }
    }
    const Image out = bicubic_upscale_x2(ramp);
    // Interior outputs whose four taps all lie inside the input.
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 4; x < out.width() - 4; ++x) {
            const double src = (x + 0.5) / 2.0 - 0.5;
            EXPECT_NEAR(out(x, y), 3.0 + 7.5 * src, 1e-6);
        }
    }
}

TEST(Bicubic, GaussianBlobRoundTrip) {
    const Image blob = testing::gaussian_blob(64, 64, 8.0);
    const Image up = bicubic_upscale_x2(simulate_lowres(blob));
    EXPECT_GT(psnr(up, blob), 40.0);
}

}  // namespace
}  // namespace qsr
