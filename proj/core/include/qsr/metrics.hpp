#pragma once

#include "qsr/image.hpp"

namespace qsr {

inline constexpr double kPeakValue = 255.0;

/// Peak signal-to-noise ratio in dB with peak 255. Identical images yield
/// +infinity. Throws DimensionError on a size mismatch.
[[nodiscard]] double psnr(const Image& a, const Image& b);

[[nodiscard]] double mean_squared_error(const Image& a, const Image& b);

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

/// Mean single-scale SSIM over all valid window positions using a Gaussian window.
/// Throws DimensionError on a size mismatch or when an image is smaller than the window.
[[nodiscard]] double ssim(const Image& a, const Image& b, const SsimParams& params = {});

}  // namespace qsr
