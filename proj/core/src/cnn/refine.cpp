#include "qsr/cnn/refine.hpp"

#include <algorithm>

#include "qsr/error.hpp"

namespace qsr::cnn {

Image predict_residual(const Network& net, const Image& reconstruction) {
    return to_image(net.forward(to_tensor(reconstruction, 1.0 / 255.0)), 255.0);
}

Image apply_vdsr(const Network& net, const Image& reconstruction) {
    Image out = predict_residual(net, reconstruction);
    const auto base = reconstruction.samples();
    auto dst = out.samples();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::clamp(base[i] + dst[i], 0.0, 255.0);
    }
    return out;
}

Image apply_vdsr_qs(const Network& net, const Image& reconstruction, const SamplingMask& mask) {
    if (mask.width() != reconstruction.width() || mask.height() != reconstruction.height()) {
        throw DimensionError("apply_vdsr_qs: mask and image sizes differ");
    }
    Image out = predict_residual(net, reconstruction);
    const auto base = reconstruction.samples();
    const auto bits = mask.bits();
    auto dst = out.samples();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = bits[i] != 0 ? base[i] : std::clamp(base[i] + dst[i], 0.0, 255.0);
    }
    return out;
}

}  // namespace qsr::cnn
