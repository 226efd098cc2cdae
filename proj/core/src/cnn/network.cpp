#include "qsr/cnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qsr/error.hpp"

namespace qsr::cnn {

namespace {

// Upper bound on im2col columns per chunk; large images are processed in row strips.
constexpr int kMaxChunkColumns = 8192;

using StridedMap = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

int rows_per_chunk(int width) { return std::max(1, kMaxChunkColumns / width); }

// cols(c * 9 + ky * 3 + kx, (y - y0) * w + x) = in(c, y + ky - 1, x + kx - 1), zero outside.
void im2col(const double* in, int channels, int h, int w, int y0, int y1, Matrix& cols) {
    const int n = (y1 - y0) * w;
    cols.resize(static_cast<Eigen::Index>(channels) * kTaps, n);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int c = 0; c < channels; ++c) {
        const double* src = in + c * plane;
        for (int ky = 0; ky < kKernelSize; ++ky) {
            for (int kx = 0; kx < kKernelSize; ++kx) {
                double* dst = cols.row(c * kTaps + ky * kKernelSize + kx).data();
                for (int y = y0; y < y1; ++y) {
                    const int sy = y + ky - 1;
                    double* line = dst + static_cast<std::size_t>(y - y0) * w;
                    if (sy < 0 || sy >= h) {
                        std::fill(line, line + w, 0.0);
                        continue;
                    }
                    const double* srow = src + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx - 1;
                        line[x] = (sx >= 0 && sx < w) ? srow[sx] : 0.0;
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatters column gradients back onto the input map.
void col2im_add(const Matrix& cols, int channels, int h, int w, int y0, int y1, double* out) {
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int c = 0; c < channels; ++c) {
        double* dst = out + c * plane;
        for (int ky = 0; ky < kKernelSize; ++ky) {
            for (int kx = 0; kx < kKernelSize; ++kx) {
                const double* src = cols.row(c * kTaps + ky * kKernelSize + kx).data();
                for (int y = y0; y < y1; ++y) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) {
                        continue;
                    }
                    const double* line = src + static_cast<std::size_t>(y - y0) * w;
                    double* drow = dst + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx - 1;
                        if (sx >= 0 && sx < w) {
                            drow[sx] += line[x];
                        }
                    }
                }
            }
        }
    }
}

// out (O x HW) = conv(in (C x HW)) + bias
void conv_forward(const ConvLayer& layer, const double* in, int h, int w, double* out, Matrix& cols) {
    const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
    const int step = rows_per_chunk(w);
    for (int y0 = 0; y0 < h; y0 += step) {
        const int y1 = std::min(h, y0 + step);
        im2col(in, layer.in_channels, h, w, y0, y1, cols);
        StridedMap dst(out + static_cast<std::size_t>(y0) * w, layer.out_channels, cols.cols(),
                       Eigen::OuterStride<>(hw));
        dst.noalias() = layer.weights * cols;
        dst.colwise() += layer.bias;
    }
}

// Accumulates weight/bias gradients and, when `grad_in` is non-null, the input gradient.
void conv_backward(const ConvLayer& layer, const double* in, const double* grad_out, int h, int w,
                   Matrix& grad_weights, Vector& grad_bias, double* grad_in, Matrix& cols,
                   Matrix& grad_cols) {
    const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
    // Plain loop: Eigen's vectorized sum peels by address, which makes the
    // rounding depend on where the buffer was allocated.
    for (int o = 0; o < layer.out_channels; ++o) {
        const double* row = grad_out + static_cast<std::size_t>(o) * hw;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < hw; ++k) {
            acc += row[k];
        }
        grad_bias(o) += acc;
    }
    const int step = rows_per_chunk(w);
    for (int y0 = 0; y0 < h; y0 += step) {
        const int y1 = std::min(h, y0 + step);
        im2col(in, layer.in_channels, h, w, y0, y1, cols);
        ConstStridedMap go(grad_out + static_cast<std::size_t>(y0) * w, layer.out_channels,
                           cols.cols(), Eigen::OuterStride<>(hw));
        grad_weights.noalias() += go * cols.transpose();
        if (grad_in != nullptr) {
            grad_cols.noalias() = layer.weights.transpose() * go;
            col2im_add(grad_cols, layer.in_channels, h, w, y0, y1, grad_in);
        }
    }
}

void require_mask_size(MeasuredMask measured, std::size_t n) {
    if (!measured.empty() && measured.size() != n) {
        throw DimensionError("loss mask size does not match the prediction");
    }
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    return v == Variant::VdsrQs ? "vdsr-qs" : "vdsr";
}

Variant parse_variant(std::string_view text) {
    if (text == "vdsr") {
        return Variant::Vdsr;
    }
    if (text == "vdsr-qs") {
        return Variant::VdsrQs;
    }
    throw ValidationError("unknown network variant '" + std::string(text) + "'");
}

ConvLayer::ConvLayer(int in, int out)
    : in_channels(in), out_channels(out), weights(Matrix::Zero(out, in * kTaps)),
      bias(Vector::Zero(out)) {
    if (in < 1 || out < 1) {
        throw DimensionError("convolution channel counts must be positive");
    }
}

std::size_t ParameterSet::count() const noexcept {
    std::size_t n = 0;
    for (const auto& w : weights) {
        n += static_cast<std::size_t>(w.size());
    }
    for (const auto& b : biases) {
        n += static_cast<std::size_t>(b.size());
    }
    return n;
}

void ParameterSet::set_zero() {
    for (auto& w : weights) {
        w.setZero();
    }
    for (auto& b : biases) {
        b.setZero();
    }
}

ParameterSet& ParameterSet::operator+=(const ParameterSet& other) {
    if (other.weights.size() != weights.size() || other.biases.size() != biases.size()) {
        throw DimensionError("parameter sets differ in layer count");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] += other.weights[i];
    }
    for (std::size_t i = 0; i < biases.size(); ++i) {
        biases[i] += other.biases[i];
    }
    return *this;
}

ParameterSet& ParameterSet::operator*=(double factor) {
    for (auto& w : weights) {
        w *= factor;
    }
    for (auto& b : biases) {
        b *= factor;
    }
    return *this;
}

Network::Network(std::vector<ConvLayer> layers, Variant variant)
    : layers_(std::move(layers)), variant_(variant) {
    if (layers_.empty()) {
        throw DimensionError("network needs at least one layer");
    }
    int channels = 1;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.in_channels != channels || l.weights.rows() != l.out_channels ||
            l.weights.cols() != static_cast<Eigen::Index>(l.in_channels) * kTaps ||
            l.bias.size() != l.out_channels) {
            throw DimensionError("layer " + std::to_string(i) + " does not chain");
        }
        channels = l.out_channels;
    }
    if (channels != 1) {
        throw DimensionError("last layer must produce one channel");
    }
}

Network Network::create(int depth, int width, std::uint64_t seed, Variant variant) {
    if (depth < 1 || width < 1) {
        throw ValidationError("network depth and width must be positive");
    }
    std::mt19937_64 rng(seed);
    std::vector<ConvLayer> layers;
    layers.reserve(static_cast<std::size_t>(depth));
    for (int i = 0; i < depth; ++i) {
        const int in = i == 0 ? 1 : width;
        const int out = i == depth - 1 ? 1 : width;
        ConvLayer layer(in, out);
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (kTaps * in)));
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = dist(rng);
            }
        }
        layers.push_back(std::move(layer));
    }
    return Network(std::move(layers), variant);
}

int Network::width() const noexcept {
    return layers_.size() > 1 ? layers_.front().out_channels : 1;
}

ParameterSet Network::zero_parameters() const {
    ParameterSet p;
    for (const auto& l : layers_) {
        p.weights.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
        p.biases.push_back(Vector::Zero(l.bias.size()));
    }
    return p;
}

Tensor Network::forward(const Tensor& input) const {
    if (input.channels() != 1) {
        throw DimensionError("network input must have one channel");
    }
    const int h = input.height();
    const int w = input.width();
    Matrix cols;
    Tensor current = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& layer = layers_[i];
        Tensor next(layer.out_channels, h, w);
        conv_forward(layer, current.data(), h, w, next.data(), cols);
        if (i + 1 < layers_.size()) {
            for (double& v : next.values()) {
                v = std::max(v, 0.0);
            }
        }
        current = std::move(next);
    }
    return current;
}

double loss(const Tensor& prediction, const Tensor& target, MeasuredMask measured) {
    if (prediction.channels() != target.channels() || prediction.height() != target.height() ||
        prediction.width() != target.width()) {
        throw DimensionError("loss: prediction and target shapes differ");
    }
    const auto p = prediction.values();
    const auto t = target.values();
    require_mask_size(measured, p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!measured.empty() && measured[i] != 0) {
            continue;
        }
        const double d = p[i] - t[i];
        acc += d * d;
    }
    return 0.5 * acc / static_cast<double>(p.size());
}

LossAndGradients compute_gradients(const Network& net, const Tensor& input, const Tensor& target,
                                   MeasuredMask measured) {
    if (input.channels() != 1) {
        throw DimensionError("network input must have one channel");
    }
    if (target.channels() != 1 || target.height() != input.height() ||
        target.width() != input.width()) {
        throw DimensionError("target shape differs from input");
    }
    const int h = input.height();
    const int w = input.width();
    const auto& layers = net.layers();
    const std::size_t depth = layers.size();

    // activations[i] is the input of layer i (post-ReLU output of layer i - 1).
    std::vector<Tensor> activations;
    activations.reserve(depth);
    activations.push_back(input);
    Matrix cols;
    Tensor prediction;
    for (std::size_t i = 0; i < depth; ++i) {
        Tensor z(layers[i].out_channels, h, w);
        conv_forward(layers[i], activations.back().data(), h, w, z.data(), cols);
        if (i + 1 < depth) {
            for (double& v : z.values()) {
                v = std::max(v, 0.0);
            }
            activations.push_back(std::move(z));
        } else {
            prediction = std::move(z);
        }
    }

    LossAndGradients result;
    result.loss = loss(prediction, target, measured);
    result.gradients = net.zero_parameters();

    // dL/dprediction = (1 - b) * (prediction - target) / N
    const auto p = prediction.values();
    const auto t = target.values();
    const double inv_n = 1.0 / static_cast<double>(p.size());
    Tensor grad(1, h, w);
    auto g = grad.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool keep = measured.empty() || measured[i] == 0;
        g[i] = keep ? (p[i] - t[i]) * inv_n : 0.0;
    }

    Matrix grad_cols;
    for (std::size_t li = depth; li-- > 0;) {
        const auto& layer = layers[li];
        const bool need_input_grad = li > 0;
        Tensor grad_in;
        if (need_input_grad) {
            grad_in = Tensor(layer.in_channels, h, w);
        }
        conv_backward(layer, activations[li].data(), grad.data(), h, w,
                      result.gradients.weights[li], result.gradients.biases[li],
                      need_input_grad ? grad_in.data() : nullptr, cols, grad_cols);
        if (need_input_grad) {
            // ReLU gate: activations[li] > 0 exactly where the pre-activation was positive.
            const auto a = activations[li].values();
            auto gi = grad_in.values();
            for (std::size_t i = 0; i < gi.size(); ++i) {
                if (a[i] <= 0.0) {
                    gi[i] = 0.0;
                }
            }
            grad = std::move(grad_in);
        }
    }
    return result;
}

ParameterSet parameters_of(const Network& net) {
    ParameterSet p;
    for (const auto& l : net.layers()) {
        p.weights.push_back(l.weights);
        p.biases.push_back(l.bias);
    }
    return p;
}

void assign_parameters(Network& net, const ParameterSet& params) {
    auto& layers = net.layers();
    if (params.weights.size() != layers.size() || params.biases.size() != layers.size()) {
        throw DimensionError("parameter set does not match the network depth");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (params.weights[i].rows() != layers[i].weights.rows() ||
            params.weights[i].cols() != layers[i].weights.cols() ||
            params.biases[i].size() != layers[i].bias.size()) {
            throw DimensionError("parameter shapes do not match layer " + std::to_string(i));
        }
        layers[i].weights = params.weights[i];
        layers[i].bias = params.biases[i];
    }
}

}  // namespace qsr::cnn
