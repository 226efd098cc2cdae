#include "qsr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "qsr/error.hpp"

namespace qsr {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed for " + path.string());
    }
    return bytes;
}

// Cursor over a netpbm header: whitespace separated decimal fields, '#' comments.
class NetpbmHeader {
public:
    NetpbmHeader(const std::vector<unsigned char>& bytes, const std::string& name)
        : bytes_(bytes), name_(name) {}

    int next_field() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw FormatError("malformed netpbm header in " + name_);
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) {
                throw FormatError("netpbm header field out of range in " + name_);
            }
            ++pos_;
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates the header from the raster.
    std::size_t raster_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("malformed netpbm header in " + name_);
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    const std::string& name_;
    std::size_t pos_ = 2;
};

Image decode_netpbm(const std::vector<unsigned char>& bytes, const std::string& name, int channels) {
    NetpbmHeader header(bytes, name);
    const int width = header.next_field();
    const int height = header.next_field();
    const int maxval = header.next_field();
    const std::size_t offset = header.raster_offset();
    if (width < 1 || height < 1) {
        throw FormatError("zero-sized netpbm image in " + name);
    }
    if (maxval != 255) {
        throw UnsupportedFormatError("only maxval 255 is supported, " + name + " has " +
                                     std::to_string(maxval));
    }
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (bytes.size() - offset < count * channels) {
        throw FormatError("truncated raster in " + name);
    }
    std::vector<double> samples(count);
    const unsigned char* raster = bytes.data() + offset;
    for (std::size_t i = 0; i < count; ++i) {
        if (channels == 1) {
            samples[i] = raster[i];
        } else {
            samples[i] = to_grayscale(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
        }
    }
    return Image(width, height, std::move(samples));
}

Image decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        throw FormatError("invalid PNG " + name + ": " + png.message);
    }
    const auto format = png.format;
    if ((format & PNG_FORMAT_FLAG_LINEAR) != 0 || (format & PNG_FORMAT_FLAG_COLORMAP) != 0 ||
        (format & PNG_FORMAT_FLAG_ALPHA) != 0) {
        png_image_free(&png);
        throw UnsupportedFormatError("only 8-bit gray or RGB PNG is supported: " + name);
    }
    const bool color = (format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<unsigned char> raster(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, raster.data(), 0, nullptr)) {
        std::string message = png.message;
        png_image_free(&png);
        throw FormatError("corrupt PNG " + name + ": " + message);
    }
    const int width = static_cast<int>(png.width);
    const int height = static_cast<int>(png.height);
    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<double> samples(count);
    for (std::size_t i = 0; i < count; ++i) {
        samples[i] = color ? to_grayscale(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2])
                           : raster[i];
    }
    return Image(width, height, std::move(samples));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    const std::string name = path.string();
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        return decode_netpbm(bytes, name, 1);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
        return decode_netpbm(bytes, name, 3);
    }
    static constexpr unsigned char kPngMagic[] = {0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), bytes.begin())) {
        return decode_png(bytes, name);
    }
    if (bytes.empty()) {
        throw FormatError("empty file " + name);
    }
    throw UnsupportedFormatError("unrecognized image format: " + name);
}

void save_image(const Image& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> raster(img.size());
    const auto samples = img.samples();
    std::transform(samples.begin(), samples.end(), raster.begin(), [](double v) {
        return static_cast<char>(static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0)));
    });
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace qsr
