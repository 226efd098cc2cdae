#include "qsr/sensor.hpp"

#include "qsr/error.hpp"

namespace qsr {

Image simulate_lowres(const Image& reference) {
    if (reference.width() % 2 != 0 || reference.height() % 2 != 0) {
        throw DimensionError("low-resolution sensor needs even image dimensions");
    }
    Image out(reference.width() / 2, reference.height() / 2);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out(x, y) = 0.25 * (reference(2 * x, 2 * y) + reference(2 * x + 1, 2 * y) +
                                reference(2 * x, 2 * y + 1) + reference(2 * x + 1, 2 * y + 1));
        }
    }
    return out;
}

SampledImage simulate_quarter(const Image& reference, const SamplingMask& mask) {
    if (reference.width() != mask.width() || reference.height() != mask.height()) {
        throw DimensionError("quarter sensor: mask and image sizes differ");
    }
    Image values(reference.width(), reference.height());
    for (int y = 0; y < reference.height(); ++y) {
        for (int x = 0; x < reference.width(); ++x) {
            if (mask(x, y)) {
                values(x, y) = reference(x, y);
            }
        }
    }
    return {std::move(values), mask};
}

}  // namespace qsr
