#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qsr/image.hpp"

namespace qsr::pipeline {

struct NamedImage {
    std::string name;
    Image image;
};

struct Dataset {
    std::vector<NamedImage> images;
    /// Files that could not be decoded, in directory order.
    std::vector<std::string> skipped;
};

/// Loads every image in `dir` (non-recursive, lexicographic filename order),
/// converted to grayscale and center-cropped to even dimensions. Unreadable
/// files are skipped and listed; hidden files are ignored.
/// Throws IoError when `dir` is not a directory and ValidationError when no
/// image could be loaded.
[[nodiscard]] Dataset ingest_dataset(const std::filesystem::path& dir);

}  // namespace qsr::pipeline
