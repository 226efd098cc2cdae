#include "qsr/cnn/patches.hpp"

#include "qsr/error.hpp"

namespace qsr::cnn {

namespace {

// Same geometric transform applied to a flat square mask.
std::vector<std::uint8_t> transform_mask(const std::vector<std::uint8_t>& bits, int n,
                                         Image (*op)(const Image&)) {
    if (bits.empty()) {
        return {};
    }
    Image tmp(n, n);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        tmp.samples()[i] = bits[i];
    }
    const Image t = op(tmp);
    std::vector<std::uint8_t> out(bits.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = t.samples()[i] != 0.0 ? 1 : 0;
    }
    return out;
}

PatchPair apply(const PatchPair& p, Image (*op)(const Image&)) {
    return {op(p.input), op(p.target), transform_mask(p.measured, p.input.width(), op)};
}

}  // namespace

std::vector<PatchPair> extract_patches(const Image& input, const Image& target, int size,
                                       int stride, const SamplingMask* mask) {
    if (!input.same_shape(target)) {
        throw DimensionError("extract_patches: input and target sizes differ");
    }
    if (mask != nullptr && (mask->width() != input.width() || mask->height() != input.height())) {
        throw DimensionError("extract_patches: mask size differs from the images");
    }
    if (size < 1 || stride < 0) {
        throw ValidationError("extract_patches: invalid patch size or stride");
    }
    if (stride == 0) {
        stride = size;
    }
    std::vector<PatchPair> out;
    for (int y = 0; y + size <= input.height(); y += stride) {
        for (int x = 0; x + size <= input.width(); x += stride) {
            PatchPair p{crop(input, x, y, size, size), crop(target, x, y, size, size), {}};
            if (mask != nullptr) {
                p.measured.resize(static_cast<std::size_t>(size) * size);
                for (int v = 0; v < size; ++v) {
                    for (int u = 0; u < size; ++u) {
                        p.measured[static_cast<std::size_t>(v) * size + u] = (*mask)(x + u, y + v) ? 1 : 0;
                    }
                }
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

Image rotate90(const Image& img) {
    const int w = img.width();
    const int h = img.height();
    Image out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out(y, w - 1 - x) = img(x, y);
        }
    }
    return out;
}

Image flip_horizontal(const Image& img) {
    Image out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            out(img.width() - 1 - x, y) = img(x, y);
        }
    }
    return out;
}

std::array<PatchPair, 8> augment_dihedral(const PatchPair& pair) {
    const int n = pair.input.width();
    if (pair.input.height() != n || !pair.input.same_shape(pair.target)) {
        throw DimensionError("dihedral augmentation needs square, equally sized patches");
    }
    if (!pair.measured.empty() && pair.measured.size() != static_cast<std::size_t>(n) * n) {
        throw DimensionError("dihedral augmentation: mask size differs from the patch");
    }
    std::array<PatchPair, 8> out;
    out[0] = pair;
    for (int r = 1; r < 4; ++r) {
        out[static_cast<std::size_t>(r)] = apply(out[static_cast<std::size_t>(r - 1)], rotate90);
    }
    for (int r = 0; r < 4; ++r) {
        out[static_cast<std::size_t>(r + 4)] = apply(out[static_cast<std::size_t>(r)], flip_horizontal);
    }
    return out;
}

}  // namespace qsr::cnn
