#pragma once

#include <filesystem>

#include "qsr/image.hpp"

namespace qsr {

/// Reads a binary PGM (P5), binary PPM (P6) or 8-bit gray / RGB PNG without alpha.
/// Color input is converted with to_grayscale.
///
/// Throws IoError when the file cannot be read, FormatError on malformed or
/// truncated data and UnsupportedFormatError for other bit depths or color types.
[[nodiscard]] Image load_image(const std::filesystem::path& path);

/// Writes a binary PGM with maxval 255. Samples are rounded and clamped to [0, 255].
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace qsr
