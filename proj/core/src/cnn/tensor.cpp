#include "qsr/cnn/tensor.hpp"

#include "qsr/error.hpp"

namespace qsr::cnn {

Tensor::Tensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 1 || height < 1 || width < 1) {
        throw DimensionError("tensor extents must be positive");
    }
    data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

Tensor to_tensor(const Image& img, double scale) {
    Tensor t(1, img.height(), img.width());
    const auto src = img.samples();
    auto dst = t.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] * scale;
    }
    return t;
}

Image to_image(const Tensor& t, double scale) {
    Image img(t.width(), t.height());
    const auto src = t.values();
    auto dst = img.samples();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = src[i] * scale;
    }
    return img;
}

}  // namespace qsr::cnn
