#include "qsr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsr/error.hpp"

namespace qsr {

namespace {

void check_extent(int width, int height) {
    if (width < 1 || height < 1) {
        throw DimensionError("image extent must be at least 1x1, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    }
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    check_extent(width, height);
    samples_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
    check_extent(width, height);
    if (samples_.size() != static_cast<std::size_t>(width) * height) {
        throw DimensionError("sample count " + std::to_string(samples_.size()) +
                             " does not match " + std::to_string(width) + "x" +
                             std::to_string(height));
    }
}

std::uint8_t to_grayscale(double r, double g, double b) noexcept {
    r = std::clamp(r, 0.0, 255.0);
    g = std::clamp(g, 0.0, 255.0);
    b = std::clamp(b, 0.0, 255.0);
    const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
}

Image crop(const Image& img, int x0, int y0, int width, int height) {
    if (x0 < 0 || y0 < 0 || width < 1 || height < 1 || x0 + width > img.width() ||
        y0 + height > img.height()) {
        throw DimensionError("crop rectangle outside of image");
    }
    Image out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out(x, y) = img(x0 + x, y0 + y);
        }
    }
    return out;
}

Image crop_to_even(const Image& img) {
    const int w = img.width() & ~1;
    const int h = img.height() & ~1;
    if (w == img.width() && h == img.height()) {
        return img;
    }
    if (w == 0 || h == 0) {
        throw DimensionError("image too small to crop to even size");
    }
    return crop(img, (img.width() - w) / 2, (img.height() - h) / 2, w, h);
}

Image crop_border(const Image& img, int border) {
    if (border <= 0) {
        return img;
    }
    return crop(img, border, border, img.width() - 2 * border, img.height() - 2 * border);
}

Image clamped(Image img, double lo, double hi) {
    for (double& v : img.samples()) {
        v = std::clamp(v, lo, hi);
    }
    return img;
}

Image quantized(Image img) {
    for (double& v : img.samples()) {
        v = std::clamp(std::round(v), 0.0, 255.0);
    }
    return img;
}

}  // namespace qsr
