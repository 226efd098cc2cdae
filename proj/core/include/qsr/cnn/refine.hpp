#pragma once

#include "qsr/cnn/network.hpp"
#include "qsr/image.hpp"
#include "qsr/mask.hpp"

namespace qsr::cnn {

/// Residual predicted by `net` for `reconstruction`, in gray levels.
[[nodiscard]] Image predict_residual(const Network& net, const Image& reconstruction);

/// reconstruction + residual, clamped to [0, 255].
[[nodiscard]] Image apply_vdsr(const Network& net, const Image& reconstruction);

/// reconstruction + residual * (1 - b), clamped to [0, 255]; measured pixels
/// pass through unchanged. Throws DimensionError when sizes differ.
[[nodiscard]] Image apply_vdsr_qs(const Network& net, const Image& reconstruction,
                                  const SamplingMask& mask);

}  // namespace qsr::cnn
