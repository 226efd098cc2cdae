#include "qsr/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace qsr {

namespace {

constexpr double kA = -0.5;

struct Taps {
    std::array<int, 4> index;
    std::array<double, 4> weight;
};

// Taps for every output coordinate along one axis of length 2 * n.
std::vector<Taps> axis_taps(int n) {
    std::vector<Taps> taps(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) {
        const double src = (i + 0.5) / 2.0 - 0.5;
        const int base = static_cast<int>(std::floor(src));
        const double frac = src - base;
        Taps& t = taps[static_cast<std::size_t>(i)];
        for (int k = 0; k < 4; ++k) {
            t.index[k] = std::clamp(base - 1 + k, 0, n - 1);
            t.weight[k] = cubic_kernel(frac - (k - 1));
        }
    }
    return taps;
}

}  // namespace

double cubic_kernel(double t) noexcept {
    t = std::abs(t);
    if (t <= 1.0) {
        return ((kA + 2.0) * t - (kA + 3.0)) * t * t + 1.0;
    }
    if (t < 2.0) {
        return ((kA * t - 5.0 * kA) * t + 8.0 * kA) * t - 4.0 * kA;
    }
    return 0.0;
}

Image bicubic_upscale_x2(const Image& img) {
    const int w = img.width();
    const int h = img.height();
    const auto xt = axis_taps(w);
    const auto yt = axis_taps(h);

    // Separable: horizontal pass into a (2w x h) buffer, then vertical.
    Image horizontal(2 * w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < 2 * w; ++x) {
            const Taps& t = xt[static_cast<std::size_t>(x)];
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                acc += t.weight[k] * img(t.index[k], y);
            }
            horizontal(x, y) = acc;
        }
    }
    Image out(2 * w, 2 * h);
    for (int y = 0; y < 2 * h; ++y) {
        const Taps& t = yt[static_cast<std::size_t>(y)];
        for (int x = 0; x < 2 * w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                acc += t.weight[k] * horizontal(x, t.index[k]);
            }
            out(x, y) = acc;
        }
    }
    return out;
}

}  // namespace qsr
