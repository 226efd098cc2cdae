#include "qsr/mask.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "qsr/error.hpp"

namespace qsr {

namespace {

constexpr std::array<std::pair<int, int>, 8> kShifts = {{
    {0, 0}, {16, 16}, {8, 24}, {24, 8}, {4, 12}, {20, 28}, {12, 4}, {28, 20},
}};

int wrap(int v, int n) {
    const int r = v % n;
    return r < 0 ? r + n : r;
}

}  // namespace

SamplingMask::SamplingMask(int width, int height, int period, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), period_(period), bits_(std::move(bits)) {
    if (width < 1 || height < 1) {
        throw DimensionError("mask extent must be at least 1x1");
    }
    if (period < 1) {
        throw ValidationError("mask period must be positive");
    }
    if (bits_.size() != static_cast<std::size_t>(width) * height) {
        throw DimensionError("mask bit count does not match its extent");
    }
    for (auto& b : bits_) {
        if (b > 1) {
            throw ValidationError("mask bits must be 0 or 1");
        }
    }
}

std::size_t SamplingMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool one_sample_per_cell(const SamplingMask& mask, int anchor_x, int anchor_y) {
    const int w = mask.width();
    const int h = mask.height();
    if (w % 2 != 0 || h % 2 != 0) {
        return false;
    }
    for (int cy = anchor_y; cy < h + anchor_y; cy += 2) {
        for (int cx = anchor_x; cx < w + anchor_x; cx += 2) {
            int n = 0;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    n += mask(wrap(cx + dx, w), wrap(cy + dy, h)) ? 1 : 0;
                }
            }
            if (n != 1) {
                return false;
            }
        }
    }
    return true;
}

void validate_mask(const SamplingMask& mask, bool check_cells) {
    if (mask.count() == 0) {
        throw ValidationError("mask has no measured pixels");
    }
    if (!check_cells) {
        return;
    }
    for (int ay = 0; ay < 2; ++ay) {
        for (int ax = 0; ax < 2; ++ax) {
            if (one_sample_per_cell(mask, ax, ay)) {
                return;
            }
        }
    }
    throw ValidationError("mask does not hold exactly one sample per 2x2 cell");
}

SamplingMask generate_random_qs_mask(int period, std::uint64_t seed) {
    if (period < 2 || period % 2 != 0) {
        throw ValidationError("mask period must be even and positive, got " + std::to_string(period));
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(period) * period, 0);
    for (int cy = 0; cy < period; cy += 2) {
        for (int cx = 0; cx < period; cx += 2) {
            // Top two bits of a 64-bit draw: uniform over the four quadrants.
            const auto quadrant = static_cast<int>(rng() >> 62);
            const int x = cx + (quadrant & 1);
            const int y = cy + (quadrant >> 1);
            bits[static_cast<std::size_t>(y) * period + x] = 1;
        }
    }
    return SamplingMask(period, period, period, std::move(bits));
}

SamplingMask regular_qs_mask(int width, int height) {
    if (width % 2 != 0 || height % 2 != 0) {
        throw DimensionError("quarter-sampling masks need even dimensions");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
    for (int y = 0; y < height; y += 2) {
        for (int x = 0; x < width; x += 2) {
            bits[static_cast<std::size_t>(y) * width + x] = 1;
        }
    }
    return SamplingMask(width, height, 2, std::move(bits));
}

SamplingMask load_mask(const std::filesystem::path& path, bool check_cells) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open mask file " + path.string());
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw FormatError("empty mask file " + path.string());
    }
    std::istringstream hs(header);
    std::string magic;
    int width = 0;
    int height = 0;
    int period = 0;
    std::string trailing;
    if (!(hs >> magic >> width >> height >> period) || magic != "QSMASK" || (hs >> trailing)) {
        throw FormatError("bad mask header in " + path.string());
    }
    if (width < 1 || height < 1 || period < 1 || width > 1 << 16 || height > 1 << 16) {
        throw FormatError("bad mask extent in " + path.string());
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(width) * height);
    std::string line;
    for (int y = 0; y < height; ++y) {
        if (!std::getline(in, line)) {
            throw FormatError("mask file " + path.string() + " is truncated");
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (static_cast<int>(line.size()) != width) {
            throw FormatError("mask row " + std::to_string(y) + " has wrong length in " +
                              path.string());
        }
        for (char c : line) {
            if (c != '0' && c != '1') {
                throw FormatError("invalid mask character in " + path.string());
            }
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
    }
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw FormatError("trailing data in mask file " + path.string());
        }
    }
    SamplingMask mask(width, height, period, std::move(bits));
    validate_mask(mask, check_cells);
    return mask;
}

void save_mask(const SamplingMask& mask, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "QSMASK " << mask.width() << ' ' << mask.height() << ' ' << mask.period() << '\n';
    std::string row(static_cast<std::size_t>(mask.width()), '0');
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            row[static_cast<std::size_t>(x)] = mask(x, y) ? '1' : '0';
        }
        out << row << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

SamplingMask tile_mask(const SamplingMask& base, int width, int height) {
    if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
        throw DimensionError("tiled mask needs even, positive dimensions");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            bits[static_cast<std::size_t>(y) * width + x] =
                base(x % base.width(), y % base.height()) ? 1 : 0;
        }
    }
    return SamplingMask(width, height, base.period(), std::move(bits));
}

SamplingMask shift_mask(const SamplingMask& mask, int dx, int dy) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bits[static_cast<std::size_t>(y) * w + x] = mask(wrap(x - dx, w), wrap(y - dy, h)) ? 1 : 0;
        }
    }
    return SamplingMask(w, h, mask.period(), std::move(bits));
}

std::span<const std::pair<int, int>> default_shifts() { return kShifts; }

std::vector<std::pair<int, int>> augmentation_shifts(int count) {
    if (count != 1 && count != 2 && count != 4 && count != 8) {
        throw ValidationError("shift count must be 1, 2, 4 or 8, got " + std::to_string(count));
    }
    return {kShifts.begin(), kShifts.begin() + count};
}

}  // namespace qsr
