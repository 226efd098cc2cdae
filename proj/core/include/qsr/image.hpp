#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qsr {

/// Dense single-channel raster with real-valued samples in row-major order.
///
/// Samples nominally live in [0, 255] but are not clamped; quantization to
/// 8 bit happens only when an image is written to disk.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> samples);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

    [[nodiscard]] double operator()(int x, int y) const noexcept {
        return samples_[static_cast<std::size_t>(y) * width_ + x];
    }
    [[nodiscard]] double& operator()(int x, int y) noexcept {
        return samples_[static_cast<std::size_t>(y) * width_ + x];
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] std::span<double> samples() noexcept { return samples_; }

    [[nodiscard]] bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> samples_;
};

/// BT.601 luma, rounded to the nearest integer. Inputs are clamped to [0, 255].
[[nodiscard]] std::uint8_t to_grayscale(double r, double g, double b) noexcept;

/// Copy of the rectangle [x0, x0 + width) x [y0, y0 + height).
[[nodiscard]] Image crop(const Image& img, int x0, int y0, int width, int height);

/// Center crop to the largest even width and height (drops at most one row and column).
[[nodiscard]] Image crop_to_even(const Image& img);

/// Removes a frame of `border` pixels on every side.
[[nodiscard]] Image crop_border(const Image& img, int border);

/// Clamps every sample to [lo, hi].
[[nodiscard]] Image clamped(Image img, double lo = 0.0, double hi = 255.0);

/// Rounds and clamps to the 8-bit range, as done when saving.
[[nodiscard]] Image quantized(Image img);

}  // namespace qsr
