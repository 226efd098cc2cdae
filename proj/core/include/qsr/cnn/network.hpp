#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qsr/cnn/tensor.hpp"

namespace qsr::cnn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr int kKernelSize = 3;
inline constexpr int kTaps = kKernelSize * kKernelSize;

enum class Variant : std::uint32_t {
    /// Plain residual: output = input + r.
    Vdsr = 0,
    /// Residual masked at measured positions: output = input + r * (1 - b).
    VdsrQs = 1,
};

[[nodiscard]] std::string_view to_string(Variant v) noexcept;
/// Parses "vdsr" / "vdsr-qs"; throws ValidationError otherwise.
[[nodiscard]] Variant parse_variant(std::string_view text);

/// Zero-padded 3x3 convolution. `weights` is out x (in * 9) with column index
/// c * 9 + ky * 3 + kx.
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    Matrix weights;
    Vector bias;

    ConvLayer() = default;
    ConvLayer(int in, int out);
};

/// Parameters of every layer in network order. Used for the network itself,
/// its gradients and the optimizer moments.
struct ParameterSet {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    [[nodiscard]] std::size_t count() const noexcept;
    void set_zero();
    ParameterSet& operator+=(const ParameterSet& other);
    ParameterSet& operator*=(double factor);
};

/// Stack of 3x3 convolutions with a ReLU after every layer except the last.
/// The first layer reads one channel and the last one writes one channel.
class Network {
public:
    Network() = default;
    /// Throws DimensionError when consecutive channel counts do not chain from 1 to 1.
    explicit Network(std::vector<ConvLayer> layers, Variant variant = Variant::Vdsr);

    /// depth layers of `width` channels, Gaussian init with std sqrt(2 / (9 * in)), zero bias.
    [[nodiscard]] static Network create(int depth, int width, std::uint64_t seed,
                                        Variant variant = Variant::Vdsr);

    [[nodiscard]] int depth() const noexcept { return static_cast<int>(layers_.size()); }
    /// Channel count of the hidden layers (1 for a single-layer network).
    [[nodiscard]] int width() const noexcept;
    [[nodiscard]] Variant variant() const noexcept { return variant_; }
    void set_variant(Variant v) noexcept { variant_ = v; }

    [[nodiscard]] const std::vector<ConvLayer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::vector<ConvLayer>& layers() noexcept { return layers_; }

    /// Zero-shaped parameter set matching this network.
    [[nodiscard]] ParameterSet zero_parameters() const;

    /// Residual prediction. Throws DimensionError unless the input has one channel.
    [[nodiscard]] Tensor forward(const Tensor& input) const;

private:
    std::vector<ConvLayer> layers_;
    Variant variant_ = Variant::Vdsr;
};

/// Measured-position indicator (1 = measured) for a masked loss; empty means unmasked.
using MeasuredMask = std::span<const std::uint8_t>;

/// Half the mean squared difference over all N pixels. With a mask the
/// difference is multiplied by (1 - b) first; N stays the full pixel count.
[[nodiscard]] double loss(const Tensor& prediction, const Tensor& target, MeasuredMask measured = {});

struct LossAndGradients {
    double loss = 0.0;
    ParameterSet gradients;
};

/// Exact backpropagation of `loss(forward(input), target, measured)`.
[[nodiscard]] LossAndGradients compute_gradients(const Network& net, const Tensor& input,
                                                 const Tensor& target, MeasuredMask measured = {});

/// Read access to the parameters of `net` as a ParameterSet copy.
[[nodiscard]] ParameterSet parameters_of(const Network& net);
/// Writes `params` back into `net`; shapes must match.
void assign_parameters(Network& net, const ParameterSet& params);

}  // namespace qsr::cnn
