#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qsr/image.hpp"
#include "qsr/mask.hpp"

namespace qsr::cnn {

/// Co-located input / target patches, plus the measured-position mask when
/// training the masked variant (empty otherwise).
struct PatchPair {
    Image input;
    Image target;
    std::vector<std::uint8_t> measured;
};

/// Patches of `size` x `size` on a regular grid with the given stride
/// (0 means stride = size). Partial patches at the right and bottom are dropped.
/// Throws DimensionError when input, target and mask sizes differ.
[[nodiscard]] std::vector<PatchPair> extract_patches(const Image& input, const Image& target,
                                                     int size = 41, int stride = 0,
                                                     const SamplingMask* mask = nullptr);

/// Quarter turn counter-clockwise.
[[nodiscard]] Image rotate90(const Image& img);
/// Mirror about the vertical axis.
[[nodiscard]] Image flip_horizontal(const Image& img);

/// The eight rotations and reflections of a square patch; element 0 is the
/// identity. Throws DimensionError for non-square patches.
[[nodiscard]] std::array<PatchPair, 8> augment_dihedral(const PatchPair& pair);

}  // namespace qsr::cnn
