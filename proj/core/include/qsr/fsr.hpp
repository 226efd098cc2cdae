#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qsr/image.hpp"
#include "qsr/sensor.hpp"

namespace qsr {

enum class FsrMode {
    /// Each window sees only measured samples; blocks are independent.
    IndependentBlocks,
    /// Blocks are visited in raster order and windows also see previously
    /// reconstructed pixels at half weight.
    SequentialReuse,
};

struct FsrParams {
    int block_size = 4;
    int border = 14;
    int iterations = 100;
    double rho = 0.7;
    double gamma = 0.5;
    FsrMode mode = FsrMode::IndependentBlocks;
    /// Worker threads for independent-blocks mode; 0 picks the hardware concurrency.
    int threads = 0;

    [[nodiscard]] int transform_size() const noexcept { return block_size + 2 * border; }
};

/// Throws ValidationError for out-of-range parameters.
void validate(const FsrParams& params);

/// A real-valued grid over the square transform support, row-major.
struct SupportGrid {
    int size = 0;
    std::vector<double> values;

    [[nodiscard]] double operator()(int x, int y) const noexcept {
        return values[static_cast<std::size_t>(y) * size + x];
    }
    [[nodiscard]] double& operator()(int x, int y) noexcept {
        return values[static_cast<std::size_t>(y) * size + x];
    }
};

/// Isotropic spatial weighting rho^d where d is the distance to the support
/// center (border + block_size / 2 on both axes).
[[nodiscard]] SupportGrid weighting_function(const FsrParams& params);

/// Index of the 2-D DFT basis function e^{i 2 pi (kx x + ky y) / N} as ky * N + kx.
using BasisIndex = int;

/// Weighted matching-pursuit selection: the basis maximizing
/// |<residual, phi_k>_w|^2 / <phi_k, phi_k>_w. Ties go to the lowest index.
/// Throws ValidationError when all weights are zero or the grids disagree in size.
[[nodiscard]] BasisIndex select_basis(const SupportGrid& residual, const SupportGrid& weights);

/// Sparse model of one transform window.
struct BlockModel {
    int size = 0;
    /// Expansion coefficient per basis index; the model is sum_k c_k phi_k.
    std::vector<std::complex<double>> coefficients;
    /// Selected basis per iteration.
    std::vector<BasisIndex> selected;

    /// Real part of the model on the full support.
    [[nodiscard]] SupportGrid synthesize() const;
};

/// Models the window `values` given per-pixel modeling weights (spatial weight
/// times measurement confidence; 0 for unknown pixels). Conjugate-symmetric
/// index pairs are updated together so the model stays real.
/// Throws ValidationError when every weight is zero.
[[nodiscard]] BlockModel model_block(const SupportGrid& values, const SupportGrid& weights,
                                     const FsrParams& params);

/// Convenience overload: window extracted from `sampled` with its top-left
/// corner at (x0, y0); pixels outside the image carry no weight.
[[nodiscard]] BlockModel model_block(const SampledImage& sampled, int x0, int y0,
                                     const FsrParams& params);

/// Frequency-selective reconstruction of the full image. Measured pixels are
/// copied bit-exactly; all others take model values clamped to [0, 255].
[[nodiscard]] Image fsr_reconstruct(const SampledImage& sampled, const FsrParams& params = {});

}  // namespace qsr
