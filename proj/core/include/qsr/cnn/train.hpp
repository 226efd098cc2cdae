#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "qsr/cnn/network.hpp"
#include "qsr/cnn/patches.hpp"
#include "qsr/image.hpp"
#include "qsr/mask.hpp"

namespace qsr::cnn {

struct TrainConfig {
    double base_lr = 1e-4;
    double lr_decay = 0.1;
    int lr_step_epochs = 10;
    int epochs = 30;
    int batch_size = 64;
    double clip_value = 0.1;
    int patch = 41;
    /// Patch stride; 0 means non-overlapping (stride = patch).
    int stride = 0;
    Variant variant = Variant::Vdsr;
    double qs_lr_factor = 4.0 / 3.0;
    bool augment_dihedral = true;
    /// Number of shifted masks used to build the training set (1, 2, 4 or 8).
    int shift_count = 1;
    std::uint64_t seed = 0;
    int depth = 20;
    int width = 64;
    /// Worker threads for per-sample gradients within a batch.
    int threads = 1;

    /// Desk-scale profile: depth 6, width 16, 2 epochs, lr 1e-3, batch 16.
    [[nodiscard]] static TrainConfig toy();
};

/// Throws ValidationError on out-of-range settings.
void validate(const TrainConfig& config);

/// Scheduled learning rate for a 0-based epoch, including the masked-variant factor.
[[nodiscard]] double learning_rate(const TrainConfig& config, int epoch);

/// One first-stage reconstruction with its reference; `mask` is required for
/// the masked variant.
struct TrainingSample {
    Image reconstruction;
    Image reference;
    std::optional<SamplingMask> mask;
};

struct LogEntry {
    int epoch = 0;
    std::int64_t step = 0;
    double lr = 0.0;
    double loss = 0.0;
};

struct TrainResult {
    Network network;
    std::vector<LogEntry> log;
};

/// Patch pairs before dihedral augmentation, scaled to [0, 1]: input is the
/// reconstruction, target the residual reference - reconstruction.
[[nodiscard]] std::vector<PatchPair> training_patches(std::span<const TrainingSample> samples,
                                                      const TrainConfig& config);

/// Trains a fresh network (or continues `initial` when given).
/// Throws ValidationError for an empty dataset or a missing mask, NumericError
/// when the loss becomes non-finite.
[[nodiscard]] TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config,
                                const Network* initial = nullptr);

/// Trains on pre-built patches (already scaled), without dihedral expansion.
[[nodiscard]] TrainResult train_on_patches(std::span<const PatchPair> patches,
                                           const TrainConfig& config, Network net);

/// CSV with header "epoch,step,lr,loss".
void write_training_log(std::span<const LogEntry> log, const std::filesystem::path& path);

}  // namespace qsr::cnn
