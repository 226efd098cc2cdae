#include "qsr/cnn/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "qsr/cnn/optimizer.hpp"
#include "qsr/error.hpp"

namespace qsr::cnn {

namespace {

// Batches are reduced in this many fixed, contiguous groups so the summation
// order does not depend on the thread count.
constexpr int kReductionGroups = 8;

constexpr double kScale = 1.0 / 255.0;

struct GroupResult {
    double loss = 0.0;
    ParameterSet gradients;
    bool used = false;
};

}  // namespace

TrainConfig TrainConfig::toy() {
    TrainConfig c;
    c.depth = 6;
    c.width = 16;
    c.epochs = 2;
    // Two epochs at the default rate barely move a fresh network; a larger rate
    // and smaller batches give enough steps to learn a useful residual.
    c.base_lr = 1e-3;
    c.batch_size = 16;
    return c;
}

void validate(const TrainConfig& c) {
    if (c.epochs < 1) {
        throw ValidationError("epochs must be at least 1");
    }
    if (c.batch_size < 1) {
        throw ValidationError("batch size must be at least 1");
    }
    if (!(c.clip_value > 0.0)) {
        throw ValidationError("clip value must be positive");
    }
    if (c.patch < 3) {
        throw ValidationError("patch size must be at least 3");
    }
    if (c.stride < 0) {
        throw ValidationError("stride must be non-negative");
    }
    if (!(c.base_lr > 0.0) || !(c.lr_decay > 0.0) || c.lr_step_epochs < 1) {
        throw ValidationError("invalid learning-rate schedule");
    }
    if (!(c.qs_lr_factor > 0.0)) {
        throw ValidationError("masked-variant learning-rate factor must be positive");
    }
    if (c.shift_count != 1 && c.shift_count != 2 && c.shift_count != 4 && c.shift_count != 8) {
        throw ValidationError("shift count must be 1, 2, 4 or 8");
    }
    if (c.depth < 1 || c.width < 1) {
        throw ValidationError("network depth and width must be positive");
    }
    if (c.threads < 1) {
        throw ValidationError("thread count must be at least 1");
    }
}

double learning_rate(const TrainConfig& config, int epoch) {
    const int drops = epoch / config.lr_step_epochs;
    double lr = config.base_lr * std::pow(config.lr_decay, drops);
    if (config.variant == Variant::VdsrQs) {
        lr *= config.qs_lr_factor;
    }
    return lr;
}

std::vector<PatchPair> training_patches(std::span<const TrainingSample> samples,
                                        const TrainConfig& config) {
    const bool masked = config.variant == Variant::VdsrQs;
    std::vector<PatchPair> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.reconstruction.same_shape(s.reference)) {
            throw DimensionError("training sample " + std::to_string(i) +
                                 ": reconstruction and reference sizes differ");
        }
        if (masked && !s.mask) {
            throw ValidationError("training sample " + std::to_string(i) +
                                  " has no mask, required for vdsr-qs");
        }
        Image input(s.reconstruction.width(), s.reconstruction.height());
        Image target(s.reconstruction.width(), s.reconstruction.height());
        const auto rec = s.reconstruction.samples();
        const auto ref = s.reference.samples();
        for (std::size_t k = 0; k < rec.size(); ++k) {
            input.samples()[k] = rec[k] * kScale;
            target.samples()[k] = (ref[k] - rec[k]) * kScale;
        }
        auto patches = extract_patches(input, target, config.patch, config.stride,
                                       masked ? &*s.mask : nullptr);
        std::move(patches.begin(), patches.end(), std::back_inserter(out));
    }
    return out;
}

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config,
                  const Network* initial) {
    validate(config);
    if (samples.empty()) {
        throw ValidationError("training set is empty");
    }
    auto patches = training_patches(samples, config);
    if (config.augment_dihedral) {
        std::vector<PatchPair> expanded;
        expanded.reserve(patches.size() * 8);
        for (const auto& p : patches) {
            for (auto& q : augment_dihedral(p)) {
                expanded.push_back(std::move(q));
            }
        }
        patches = std::move(expanded);
    }
    Network net = initial != nullptr
                      ? *initial
                      : Network::create(config.depth, config.width, config.seed, config.variant);
    net.set_variant(config.variant);
    return train_on_patches(patches, config, std::move(net));
}

TrainResult train_on_patches(std::span<const PatchPair> patches, const TrainConfig& config,
                             Network net) {
    validate(config);
    if (patches.empty()) {
        throw ValidationError("no training patches (images smaller than the patch size?)");
    }
    const bool masked = config.variant == Variant::VdsrQs;
    for (const auto& p : patches) {
        if (masked && p.measured.empty()) {
            throw ValidationError("vdsr-qs training needs a mask for every patch");
        }
    }

    TrainResult result;
    AdamState state(net);
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::int64_t step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const double lr = learning_rate(config, epoch);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const std::size_t batch = end - start;

            std::vector<GroupResult> groups(kReductionGroups);
            auto run_group = [&](int g) {
                const std::size_t lo = start + batch * static_cast<std::size_t>(g) / kReductionGroups;
                const std::size_t hi = start + batch * static_cast<std::size_t>(g + 1) / kReductionGroups;
                GroupResult& r = groups[static_cast<std::size_t>(g)];
                for (std::size_t i = lo; i < hi; ++i) {
                    const PatchPair& p = patches[order[i]];
                    auto lg = compute_gradients(net, to_tensor(p.input), to_tensor(p.target),
                                                masked ? MeasuredMask(p.measured) : MeasuredMask{});
                    r.loss += lg.loss;
                    if (r.used) {
                        r.gradients += lg.gradients;
                    } else {
                        r.gradients = std::move(lg.gradients);
                        r.used = true;
                    }
                }
            };
            if (config.threads == 1) {
                for (int g = 0; g < kReductionGroups; ++g) {
                    run_group(g);
                }
            } else {
                std::atomic<int> next{0};
                std::vector<std::jthread> pool;
                const int workers = std::min(config.threads, kReductionGroups);
                for (int t = 0; t < workers; ++t) {
                    pool.emplace_back([&] {
                        for (int g = next++; g < kReductionGroups; g = next++) {
                            run_group(g);
                        }
                    });
                }
            }

            double batch_loss = 0.0;
            ParameterSet grads = net.zero_parameters();
            for (const auto& g : groups) {
                if (g.used) {
                    batch_loss += g.loss;
                    grads += g.gradients;
                }
            }
            batch_loss /= static_cast<double>(batch);
            grads *= 1.0 / static_cast<double>(batch);
            if (!std::isfinite(batch_loss)) {
                throw NumericError("training loss became non-finite at epoch " +
                                   std::to_string(epoch + 1) + ", step " + std::to_string(step + 1));
            }
            clip_gradients(grads, config.clip_value);
            adam_step(net, grads, state, lr);
            ++step;
            result.log.push_back({epoch + 1, step, lr, batch_loss});
        }
    }
    result.network = std::move(net);
    return result;
}

void write_training_log(std::span<const LogEntry> log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "epoch,step,lr,loss\n" << std::setprecision(10);
    for (const auto& e : log) {
        out << e.epoch << ',' << e.step << ',' << e.lr << ',' << e.loss << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace qsr::cnn
