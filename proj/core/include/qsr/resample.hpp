#pragma once

#include "qsr/image.hpp"

namespace qsr {

/// Cubic convolution kernel with a = -0.5.
[[nodiscard]] double cubic_kernel(double t) noexcept;

/// Twofold bicubic upscaling with half-pixel-center alignment and edge replication.
/// Output pixel (x, y) samples the input at ((x + 0.5) / 2 - 0.5, (y + 0.5) / 2 - 0.5).
[[nodiscard]] Image bicubic_upscale_x2(const Image& img);

}  // namespace qsr
