#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsr/cnn/network.hpp"
#include "qsr/cnn/train.hpp"
#include "qsr/fsr.hpp"
#include "qsr/image.hpp"
#include "qsr/mask.hpp"
#include "qsr/pipeline/dataset.hpp"

namespace qsr::pipeline {

enum class Sensor { LowRes, Quarter };
enum class Reconstructor { Bicubic, Fsr };
enum class Refiner { None, Vdsr, VdsrQs };

[[nodiscard]] std::string_view to_string(Sensor s) noexcept;
[[nodiscard]] std::string_view to_string(Reconstructor r) noexcept;
[[nodiscard]] std::string_view to_string(Refiner r) noexcept;
/// Parsers accept the CLI spellings (lowres|quarter, bicubic|fsr, none|vdsr|vdsr-qs)
/// and throw ValidationError otherwise.
[[nodiscard]] Sensor parse_sensor(std::string_view text);
[[nodiscard]] Reconstructor parse_reconstructor(std::string_view text);
[[nodiscard]] Refiner parse_refiner(std::string_view text);

/// One acquisition and reconstruction path.
struct ChainConfig {
    Sensor sensor = Sensor::Quarter;
    Reconstructor reconstructor = Reconstructor::Fsr;
    Refiner refiner = Refiner::None;
    /// Base (period x period) mask; tiled over the image after shifting.
    SamplingMask base_mask = generate_random_qs_mask(kDefaultMaskPeriod, 0);
    std::pair<int, int> shift{0, 0};
    FsrParams fsr;
    std::filesystem::path model_path;
    /// Loaded model; run_chain loads `model_path` when this is empty.
    std::shared_ptr<const cnn::Network> model;

    /// "sensor+recon[+refiner]", e.g. "quarter+fsr+vdsr-qs".
    [[nodiscard]] std::string name() const;
    /// One-line summary of every setting that affects the output.
    [[nodiscard]] std::string describe() const;
};

/// Throws ValidationError for combinations outside the two sensor paths:
/// lowres needs bicubic, quarter needs fsr, vdsr-qs needs the quarter path.
void validate(const ChainConfig& config);

/// Loads the model referenced by `config` if needed. Throws ValidationError
/// when a refiner is requested without a model.
void resolve_model(ChainConfig& config);

/// Mask covering a width x height image: shift the base, then tile.
[[nodiscard]] SamplingMask chain_mask(const ChainConfig& config, int width, int height);

struct ChainOutput {
    Image output;
    /// First-stage reconstruction (bicubic or FSR) before refinement.
    Image intermediate;
    /// Sampling mask for the quarter path.
    std::optional<SamplingMask> mask;
};

/// Runs sensor simulation, first-stage reconstruction and optional refinement.
/// The reference must have even dimensions.
[[nodiscard]] ChainOutput run_chain(const Image& reference, const ChainConfig& config);

/// One training sample per (image, shifted mask) for the quarter path, or per
/// image for the lowres path (which only supports a shift count of 1).
[[nodiscard]] std::vector<cnn::TrainingSample> make_training_set(std::span<const NamedImage> images,
                                                                 const ChainConfig& config,
                                                                 int shift_count);

struct NamedChain {
    std::string name;
    ChainConfig config;
};

struct EvalRow {
    std::string chain;
    std::string image;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::string dataset;
    /// Chain names in evaluation order.
    std::vector<std::string> chains;
    /// Per-image rows, grouped by chain in `chains` order, images sorted by name.
    std::vector<EvalRow> rows;
    /// One row per chain with image == "MEAN".
    std::vector<EvalRow> means;
    /// Settings echo ("border-crop = 0", "<chain>: <describe()>").
    std::vector<std::string> config;
};

/// Runs every chain on every image; `border_crop` pixels are removed on each
/// side before PSNR / SSIM. Errors are rethrown naming the offending image.
[[nodiscard]] EvalReport evaluate_dataset(std::span<const NamedImage> images,
                                          std::span<const NamedChain> chains, int border_crop = 0,
                                          std::string dataset_id = {});

}  // namespace qsr::pipeline
