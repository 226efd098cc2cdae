#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsr/image.hpp"

namespace qsr::cnn {

/// Channel-major (C x H x W) feature map.
class Tensor {
public:
    Tensor() = default;
    Tensor(int channels, int height, int width, double fill = 0.0);

    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] std::size_t plane() const noexcept {
        return static_cast<std::size_t>(height_) * width_;
    }

    [[nodiscard]] double operator()(int c, int y, int x) const noexcept {
        return data_[c * plane() + static_cast<std::size_t>(y) * width_ + x];
    }
    [[nodiscard]] double& operator()(int c, int y, int x) noexcept {
        return data_[c * plane() + static_cast<std::size_t>(y) * width_ + x];
    }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }
    [[nodiscard]] std::span<double> values() noexcept { return data_; }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// Single-channel tensor holding `img * scale`.
[[nodiscard]] Tensor to_tensor(const Image& img, double scale = 1.0);

/// Image holding channel 0 of `t` times `scale`.
[[nodiscard]] Image to_image(const Tensor& t, double scale = 1.0);

}  // namespace qsr::cnn
