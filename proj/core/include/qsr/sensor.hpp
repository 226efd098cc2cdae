#pragma once

#include "qsr/image.hpp"
#include "qsr/mask.hpp"

namespace qsr {

/// Quarter-sampled measurement on the high-resolution grid. `values` holds the
/// reference where the mask is set and 0 elsewhere.
struct SampledImage {
    Image values;
    SamplingMask mask;
};

/// Low-resolution box sensor: each output pixel is the mean of an aligned 2x2 cell.
/// Throws DimensionError for odd dimensions.
[[nodiscard]] Image simulate_lowres(const Image& reference);

/// Quarter-sampling sensor: element-wise product of reference and mask.
/// Throws DimensionError when sizes differ.
[[nodiscard]] SampledImage simulate_quarter(const Image& reference, const SamplingMask& mask);

}  // namespace qsr
