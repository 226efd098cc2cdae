// Writes synthetic test images: make_images <dir> <count> <size> <seed>
#include <qsr/image_io.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "test_support.hpp"

int main(int argc, char** argv) {
    if (argc != 5) {
        return 1;
    }
    const std::filesystem::path dir = argv[1];
    const int count = std::atoi(argv[2]);
    const int size = std::atoi(argv[3]);
    const auto seed = static_cast<std::uint64_t>(std::atoll(argv[4]));
    std::filesystem::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        qsr::save_image(qsr::testing::urban_image(size, size, seed + static_cast<std::uint64_t>(i)),
                        dir / ("img" + std::to_string(i) + ".pgm"));
    }
    return 0;
}
