#include "qsr/pipeline/dataset.hpp"

#include <algorithm>

#include "qsr/error.hpp"
#include "qsr/image_io.hpp"

namespace qsr::pipeline {

Dataset ingest_dataset(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (!name.empty() && name.front() != '.' && entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

    Dataset out;
    for (const auto& file : files) {
        try {
            Image img = load_image(file);
            if (img.width() < 2 || img.height() < 2) {
                throw DimensionError("image too small");
            }
            out.images.push_back({file.filename().string(), crop_to_even(img)});
        } catch (const Error&) {
            out.skipped.push_back(file.filename().string());
        }
    }
    if (out.images.empty()) {
        throw ValidationError("no readable images in " + dir.string());
    }
    return out;
}

}  // namespace qsr::pipeline
