#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace qsr {

inline constexpr int kDefaultMaskPeriod = 32;

/// Binary sampling mask on the high-resolution grid; 1 marks a measured pixel.
///
/// `period` is the edge length of the base pattern the mask was tiled from.
/// A base mask has width == height == period.
class SamplingMask {
public:
    SamplingMask() = default;
    SamplingMask(int width, int height, int period, std::vector<std::uint8_t> bits);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int period() const noexcept { return period_; }

    [[nodiscard]] bool operator()(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::size_t count() const noexcept;

    friend bool operator==(const SamplingMask&, const SamplingMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int period_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// True when every cyclic 2x2 cell anchored at (anchor_x, anchor_y) holds exactly one sample.
[[nodiscard]] bool one_sample_per_cell(const SamplingMask& mask, int anchor_x = 0, int anchor_y = 0);

/// Throws ValidationError unless the mask is non-empty and, when `check_cells`
/// is set, has exactly one sample per 2x2 cell for some cell anchoring.
void validate_mask(const SamplingMask& mask, bool check_cells = true);

/// Base mask with one uniformly chosen quadrant per aligned 2x2 cell.
/// Deterministic per seed. Throws ValidationError for odd or non-positive periods.
[[nodiscard]] SamplingMask generate_random_qs_mask(int period, std::uint64_t seed);

/// Mask whose samples all sit at the top-left quadrant of each cell.
[[nodiscard]] SamplingMask regular_qs_mask(int width, int height);

/// Text mask format: "QSMASK <width> <height> <period>" followed by `height`
/// lines of `width` characters '0' / '1'.
[[nodiscard]] SamplingMask load_mask(const std::filesystem::path& path, bool check_cells = true);
void save_mask(const SamplingMask& mask, const std::filesystem::path& path);

/// bits(x, y) = base(x mod base.width, y mod base.height). Width and height must be even.
[[nodiscard]] SamplingMask tile_mask(const SamplingMask& base, int width, int height);

/// Cyclic shift over the mask's own extent: out(x, y) = in(x - dx, y - dy) modulo
/// (width, height). Shift a base mask and tile it to cover larger images.
[[nodiscard]] SamplingMask shift_mask(const SamplingMask& mask, int dx, int dy);

/// Fixed augmentation shift list spread over the 32-pixel period; the first
/// `count` entries are used for `count`-fold shifted-mask augmentation.
[[nodiscard]] std::span<const std::pair<int, int>> default_shifts();

/// First `count` shifts of default_shifts(); count must be 1, 2, 4 or 8.
[[nodiscard]] std::vector<std::pair<int, int>> augmentation_shifts(int count);

}  // namespace qsr
