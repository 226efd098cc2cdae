#pragma once

#include <filesystem>

#include "qsr/cnn/network.hpp"

namespace qsr::cnn {

/// Binary model file: magic "VDSRQS1", then little-endian uint32 depth, width,
/// kernel size and variant tag, then per layer the float32 weights
/// (out, in, ky, kx order) followed by the float32 biases.
void save_model(const Network& net, const std::filesystem::path& path);

/// Throws IoError, or FormatError on a bad header or wrong total length.
[[nodiscard]] Network load_model(const std::filesystem::path& path);

}  // namespace qsr::cnn
