#include "qsr/cnn/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "qsr/error.hpp"

namespace qsr::cnn {

namespace {

constexpr std::string_view kMagic = "VDSRQS1";
constexpr std::size_t kHeaderBytes = kMagic.size() + 4 * sizeof(std::uint32_t);

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_f32(std::vector<unsigned char>& out, double v) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double get_f32(const unsigned char* p) {
    return static_cast<double>(std::bit_cast<float>(get_u32(p)));
}

std::size_t layer_floats(int in, int out) {
    return static_cast<std::size_t>(out) * in * kTaps + static_cast<std::size_t>(out);
}

}  // namespace

void save_model(const Network& net, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(kMagic.begin(), kMagic.end());
    put_u32(bytes, static_cast<std::uint32_t>(net.depth()));
    put_u32(bytes, static_cast<std::uint32_t>(net.width()));
    put_u32(bytes, static_cast<std::uint32_t>(kKernelSize));
    put_u32(bytes, static_cast<std::uint32_t>(net.variant()));
    for (const auto& layer : net.layers()) {
        // Row-major weights already follow (out, in, ky, kx).
        for (Eigen::Index o = 0; o < layer.weights.rows(); ++o) {
            for (Eigen::Index k = 0; k < layer.weights.cols(); ++k) {
                put_f32(bytes, layer.weights(o, k));
            }
        }
        for (Eigen::Index o = 0; o < layer.bias.size(); ++o) {
            put_f32(bytes, layer.bias(o));
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Network load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file " + path.string());
    }
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                           std::istreambuf_iterator<char>());
    const std::string name = path.string();
    if (bytes.size() < kHeaderBytes ||
        std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw FormatError("not a model file: " + name);
    }
    const unsigned char* p = bytes.data() + kMagic.size();
    const std::uint32_t depth = get_u32(p);
    const std::uint32_t width = get_u32(p + 4);
    const std::uint32_t kernel = get_u32(p + 8);
    const std::uint32_t variant = get_u32(p + 12);
    if (depth < 1 || depth > 1024 || width < 1 || width > 4096) {
        throw FormatError("implausible network shape in " + name);
    }
    if (kernel != static_cast<std::uint32_t>(kKernelSize)) {
        throw FormatError("unsupported kernel size " + std::to_string(kernel) + " in " + name);
    }
    if (variant > 1) {
        throw FormatError("unknown variant tag in " + name);
    }
    auto in_ch = [&](std::uint32_t i) { return i == 0 ? 1 : static_cast<int>(width); };
    auto out_ch = [&](std::uint32_t i) { return i + 1 == depth ? 1 : static_cast<int>(width); };
    std::size_t floats = 0;
    for (std::uint32_t i = 0; i < depth; ++i) {
        floats += layer_floats(in_ch(i), out_ch(i));
    }
    if (bytes.size() != kHeaderBytes + 4 * floats) {
        throw FormatError("model file " + name + " has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(kHeaderBytes + 4 * floats));
    }
    p = bytes.data() + kHeaderBytes;
    std::vector<ConvLayer> layers;
    layers.reserve(depth);
    for (std::uint32_t i = 0; i < depth; ++i) {
        ConvLayer layer(in_ch(i), out_ch(i));
        for (Eigen::Index o = 0; o < layer.weights.rows(); ++o) {
            for (Eigen::Index k = 0; k < layer.weights.cols(); ++k, p += 4) {
                layer.weights(o, k) = get_f32(p);
            }
        }
        for (Eigen::Index o = 0; o < layer.bias.size(); ++o, p += 4) {
            layer.bias(o) = get_f32(p);
        }
        layers.push_back(std::move(layer));
    }
    return Network(std::move(layers), static_cast<Variant>(variant));
}

}  // namespace qsr::cnn
