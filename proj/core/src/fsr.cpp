#include "qsr/fsr.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "qsr/error.hpp"

namespace qsr {

namespace {

using Complex = std::complex<double>;

// FFTW planning is not thread-safe, execution with the new-array interface is.
class FftPlans {
public:
    static const FftPlans& get(int n) {
        static std::mutex mutex;
        static std::map<int, FftPlans> cache;
        const std::lock_guard lock(mutex);
        auto it = cache.find(n);
        if (it == cache.end()) {
            it = cache.emplace(n, FftPlans(n)).first;
        }
        return it->second;
    }

    void forward(const Complex* in, Complex* out) const { execute(forward_, in, out); }
    void backward(const Complex* in, Complex* out) const { execute(backward_, in, out); }

private:
    explicit FftPlans(int n) {
        // Out-of-place plans: execution always uses distinct input and output arrays.
        std::vector<Complex> in(static_cast<std::size_t>(n) * n);
        std::vector<Complex> out(in.size());
        auto* src = reinterpret_cast<fftw_complex*>(in.data());
        auto* dst = reinterpret_cast<fftw_complex*>(out.data());
        constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_2d(n, n, src, dst, FFTW_FORWARD, kFlags);
        backward_ = fftw_plan_dft_2d(n, n, src, dst, FFTW_BACKWARD, kFlags);
    }

    static void execute(fftw_plan plan, const Complex* in, Complex* out) {
        // FFTW does not modify the input of an out-of-place complex transform.
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

std::vector<Complex> to_complex(const std::vector<double>& v) {
    return {v.begin(), v.end()};
}

BasisIndex argmax_magnitude(const std::vector<Complex>& spectrum) {
    BasisIndex best = 0;
    double best_value = -1.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double m = std::norm(spectrum[k]);
        if (m > best_value) {
            best_value = m;
            best = static_cast<BasisIndex>(k);
        }
    }
    return best;
}

double total_weight(const SupportGrid& weights) {
    double sum = 0.0;
    for (double w : weights.values) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw ValidationError("modeling weights must be finite and non-negative");
        }
        sum += w;
    }
    return sum;
}

// Shared per-image state for fsr_reconstruct.
struct Reconstruction {
    const SampledImage& sampled;
    const FsrParams& params;
    SupportGrid spatial;
    Image output;
    // 0 unknown, 1 measured, 2 reconstructed; only used in sequential-reuse mode.
    std::vector<std::uint8_t> state;
    int blocks_x = 0;
    int blocks_y = 0;

    Reconstruction(const SampledImage& s, const FsrParams& p)
        : sampled(s), params(p), spatial(weighting_function(p)), output(s.values) {
        const int w = s.values.width();
        const int h = s.values.height();
        blocks_x = (w + p.block_size - 1) / p.block_size;
        blocks_y = (h + p.block_size - 1) / p.block_size;
        state.resize(static_cast<std::size_t>(w) * h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                state[static_cast<std::size_t>(y) * w + x] = s.mask(x, y) ? 1 : 0;
            }
        }
    }

    // Returns false when the window holds no usable sample.
    bool process_block(int block) {
        const int w = output.width();
        const int h = output.height();
        const int bs = params.block_size;
        const int n = params.transform_size();
        const int bx = (block % blocks_x) * bs;
        const int by = (block / blocks_x) * bs;
        const int x0 = bx - params.border;
        const int y0 = by - params.border;
        const bool reuse = params.mode == FsrMode::SequentialReuse;

        SupportGrid values{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
        SupportGrid weights{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
        bool any = false;
        for (int v = 0; v < n; ++v) {
            const int y = y0 + v;
            if (y < 0 || y >= h) {
                continue;
            }
            for (int u = 0; u < n; ++u) {
                const int x = x0 + u;
                if (x < 0 || x >= w) {
                    continue;
                }
                const auto s = state[static_cast<std::size_t>(y) * w + x];
                double confidence = 0.0;
                if (s == 1) {
                    confidence = 1.0;
                    values(u, v) = sampled.values(x, y);
                } else if (s == 2 && reuse) {
                    confidence = 0.5;
                    values(u, v) = output(x, y);
                }
                if (confidence > 0.0) {
                    weights(u, v) = confidence * spatial(u, v);
                    any = true;
                }
            }
        }
        if (!any) {
            return false;
        }
        const SupportGrid model = model_block(values, weights, params).synthesize();
        for (int y = by; y < std::min(by + bs, h); ++y) {
            for (int x = bx; x < std::min(bx + bs, w); ++x) {
                auto& s = state[static_cast<std::size_t>(y) * w + x];
                if (s != 1) {
                    output(x, y) = std::clamp(model(x - x0, y - y0), 0.0, 255.0);
                    if (reuse) {
                        s = 2;
                    }
                }
            }
        }
        return true;
    }

    // Blocks whose window held no sample take the mean of the nearest measured pixels.
    void fill_empty_block(int block) {
        const int w = output.width();
        const int h = output.height();
        const int bs = params.block_size;
        const int bx = (block % blocks_x) * bs;
        const int by = (block / blocks_x) * bs;
        for (int radius = params.border + bs;; radius *= 2) {
            double sum = 0.0;
            int count = 0;
            for (int y = std::max(0, by - radius); y < std::min(h, by + bs + radius); ++y) {
                for (int x = std::max(0, bx - radius); x < std::min(w, bx + bs + radius); ++x) {
                    if (sampled.mask(x, y)) {
                        sum += sampled.values(x, y);
                        ++count;
                    }
                }
            }
            if (count > 0) {
                const double mean = std::clamp(sum / count, 0.0, 255.0);
                for (int y = by; y < std::min(by + bs, h); ++y) {
                    for (int x = bx; x < std::min(bx + bs, w); ++x) {
                        if (!sampled.mask(x, y)) {
                            output(x, y) = mean;
                        }
                    }
                }
                return;
            }
            if (radius > std::max(w, h)) {
                throw ValidationError("cannot reconstruct: image has no measured pixels");
            }
        }
    }
};

}  // namespace

void validate(const FsrParams& params) {
    if (params.block_size < 1) {
        throw ValidationError("fsr.block must be positive");
    }
    if (params.border < 0) {
        throw ValidationError("fsr.border must be non-negative");
    }
    if (params.iterations < 1) {
        throw ValidationError("fsr.iterations must be at least 1");
    }
    if (!(params.rho > 0.0 && params.rho < 1.0)) {
        throw ValidationError("fsr.rho must lie in (0, 1)");
    }
    if (!(params.gamma > 0.0 && params.gamma <= 1.0)) {
        throw ValidationError("fsr.gamma must lie in (0, 1]");
    }
    if (params.threads < 0) {
        throw ValidationError("fsr thread count must be non-negative");
    }
}

SupportGrid weighting_function(const FsrParams& params) {
    const int n = params.transform_size();
    const double center = params.border + params.block_size / 2;
    SupportGrid w{n, std::vector<double>(static_cast<std::size_t>(n) * n)};
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            w(x, y) = std::pow(params.rho, std::hypot(x - center, y - center));
        }
    }
    return w;
}

BasisIndex select_basis(const SupportGrid& residual, const SupportGrid& weights) {
    const int n = residual.size;
    if (n < 1 || weights.size != n || residual.values.size() != static_cast<std::size_t>(n) * n ||
        weights.values.size() != residual.values.size()) {
        throw ValidationError("select_basis: residual and weight grids differ in size");
    }
    if (total_weight(weights) <= 0.0) {
        throw ValidationError("select_basis: all weights are zero");
    }
    // <phi_k, phi_k>_w = sum(w) for every k, so only the numerator matters.
    std::vector<Complex> weighted(residual.values.size());
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        weighted[i] = residual.values[i] * weights.values[i];
    }
    std::vector<Complex> spectrum(weighted.size());
    FftPlans::get(n).forward(weighted.data(), spectrum.data());
    return argmax_magnitude(spectrum);
}

SupportGrid BlockModel::synthesize() const {
    std::vector<Complex> spatial(coefficients.size());
    FftPlans::get(size).backward(coefficients.data(), spatial.data());
    SupportGrid out{size, std::vector<double>(spatial.size())};
    for (std::size_t i = 0; i < spatial.size(); ++i) {
        out.values[i] = spatial[i].real();
    }
    return out;
}

BlockModel model_block(const SupportGrid& values, const SupportGrid& weights,
                       const FsrParams& params) {
    const int n = values.size;
    if (weights.size != n || values.values.size() != static_cast<std::size_t>(n) * n ||
        weights.values.size() != values.values.size()) {
        throw ValidationError("model_block: value and weight grids differ in size");
    }
    const double weight_sum = total_weight(weights);
    if (weight_sum <= 0.0) {
        throw ValidationError("model_block: window contains no measured pixel");
    }
    const std::size_t count = values.values.size();
    const FftPlans& fft = FftPlans::get(n);

    std::vector<Complex> weighted(count);
    for (std::size_t i = 0; i < count; ++i) {
        weighted[i] = values.values[i] * weights.values[i];
    }
    // Spectrum of the weighted residual; projections onto every basis at once.
    std::vector<Complex> residual(count);
    fft.forward(weighted.data(), residual.data());

    // Spectrum of the weights, tiled 2x2 so W(l - k) is a contiguous row slice.
    std::vector<Complex> weight_spectrum(count);
    fft.forward(to_complex(weights.values).data(), weight_spectrum.data());
    const int n2 = 2 * n;
    std::vector<Complex> tiled(static_cast<std::size_t>(n2) * n2);
    for (int y = 0; y < n2; ++y) {
        for (int x = 0; x < n2; ++x) {
            tiled[static_cast<std::size_t>(y) * n2 + x] =
                weight_spectrum[static_cast<std::size_t>(y % n) * n + (x % n)];
        }
    }
    // residual(l) -= c * W(l - k)
    auto subtract_shifted = [&](Complex c, int kx, int ky) {
        for (int ly = 0; ly < n; ++ly) {
            const Complex* row = tiled.data() + static_cast<std::size_t>(ly - ky + n) * n2 + (n - kx);
            Complex* out = residual.data() + static_cast<std::size_t>(ly) * n;
            for (int lx = 0; lx < n; ++lx) {
                out[lx] -= c * row[lx];
            }
        }
    };

    BlockModel model;
    model.size = n;
    model.coefficients.assign(count, Complex{});
    model.selected.reserve(static_cast<std::size_t>(params.iterations));

    for (int it = 0; it < params.iterations; ++it) {
        const BasisIndex k = argmax_magnitude(residual);
        model.selected.push_back(k);
        const int kx = k % n;
        const int ky = k / n;
        const int cx = (n - kx) % n;
        const int cy = (n - ky) % n;
        Complex c = params.gamma * residual[static_cast<std::size_t>(k)] / weight_sum;
        if (cx == kx && cy == ky) {
            // Self-conjugate basis (entries are +-1): the coefficient is real.
            c = Complex(c.real(), 0.0);
            model.coefficients[static_cast<std::size_t>(k)] += c;
            subtract_shifted(c, kx, ky);
        } else {
            model.coefficients[static_cast<std::size_t>(k)] += c;
            model.coefficients[static_cast<std::size_t>(cy) * n + cx] += std::conj(c);
            subtract_shifted(c, kx, ky);
            subtract_shifted(std::conj(c), cx, cy);
        }
    }
    return model;
}

BlockModel model_block(const SampledImage& sampled, int x0, int y0, const FsrParams& params) {
    validate(params);
    const int n = params.transform_size();
    const SupportGrid spatial = weighting_function(params);
    SupportGrid values{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    SupportGrid weights{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) {
            const int x = x0 + u;
            const int y = y0 + v;
            if (x >= 0 && y >= 0 && x < sampled.values.width() && y < sampled.values.height() &&
                sampled.mask(x, y)) {
                values(u, v) = sampled.values(x, y);
                weights(u, v) = spatial(u, v);
            }
        }
    }
    return model_block(values, weights, params);
}

Image fsr_reconstruct(const SampledImage& sampled, const FsrParams& params) {
    validate(params);
    if (sampled.values.width() != sampled.mask.width() ||
        sampled.values.height() != sampled.mask.height()) {
        throw DimensionError("fsr_reconstruct: mask and image sizes differ");
    }
    Reconstruction rec(sampled, params);
    const int blocks = rec.blocks_x * rec.blocks_y;
    std::vector<std::uint8_t> empty(static_cast<std::size_t>(blocks), 0);

    if (params.mode == FsrMode::SequentialReuse) {
        for (int b = 0; b < blocks; ++b) {
            empty[static_cast<std::size_t>(b)] = rec.process_block(b) ? 0 : 1;
        }
    } else {
        int threads = params.threads > 0 ? params.threads
                                         : static_cast<int>(std::thread::hardware_concurrency());
        threads = std::clamp(threads, 1, blocks);
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            try {
                for (int b = next++; b < blocks; b = next++) {
                    empty[static_cast<std::size_t>(b)] = rec.process_block(b) ? 0 : 1;
                }
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = blocks;
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back(worker);
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    for (int b = 0; b < blocks; ++b) {
        if (empty[static_cast<std::size_t>(b)] != 0) {
            rec.fill_empty_block(b);
        }
    }
    return rec.output;
}

}  // namespace qsr
