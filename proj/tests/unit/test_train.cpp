#include <gtest/gtest.h>

#include <qsr/cnn/train.hpp>
#include <qsr/error.hpp>

#include <cmath>
#include <limits>

#include "test_support.hpp"

namespace qsr::cnn {
namespace {

using qsr::testing::Rng;

std::vector<TrainingSample> small_dataset(int count, bool masks) {
    std::vector<TrainingSample> out;
    for (int i = 0; i < count; ++i) {
        const Image ref = qsr::testing::urban_image(48, 48, 100 + i);
        Image rec = ref;
        Rng rng(static_cast<std::uint64_t>(i));
        for (double& v : rec.samples()) {
            v = std::clamp(v + rng.normal(0.0, 8.0), 0.0, 255.0);
        }
        std::optional<SamplingMask> m;
        if (masks) {
            m = tile_mask(generate_random_qs_mask(32, static_cast<std::uint64_t>(i)), 48, 48);
        }
        out.push_back({rec, ref, m});
    }
    return out;
}

TrainConfig tiny_config() {
    TrainConfig c;
    c.depth = 3;
    c.width = 4;
    c.epochs = 2;
    c.batch_size = 4;
    c.patch = 16;
    c.base_lr = 1e-3;
    c.seed = 7;
    return c;
}

TEST(TrainConfig, DefaultsAndToyProfile) {
    const TrainConfig c;
    EXPECT_EQ(c.base_lr, 1e-4);
    EXPECT_EQ(c.epochs, 30);
    EXPECT_EQ(c.batch_size, 64);
    EXPECT_EQ(c.clip_value, 0.1);
    EXPECT_EQ(c.patch, 41);
    EXPECT_EQ(c.depth, 20);
    EXPECT_EQ(c.width, 64);
    EXPECT_DOUBLE_EQ(c.qs_lr_factor, 4.0 / 3.0);
    const TrainConfig t = TrainConfig::toy();
    EXPECT_EQ(t.depth, 6);
    EXPECT_EQ(t.width, 16);
    EXPECT_EQ(t.epochs, 2);
    EXPECT_EQ(t.base_lr, 1e-3);
    EXPECT_EQ(t.batch_size, 16);
    EXPECT_EQ(t.clip_value, 0.1);
    EXPECT_EQ(t.patch, 41);
}

TEST(TrainConfig, Validation) {
    auto bad = [](auto mutate) {
        TrainConfig c;
        mutate(c);
        EXPECT_THROW(validate(c), ValidationError);
    };
    bad([](TrainConfig& c) { c.epochs = 0; });
    bad([](TrainConfig& c) { c.clip_value = 0.0; });
    bad([](TrainConfig& c) { c.batch_size = 0; });
    bad([](TrainConfig& c) { c.shift_count = 3; });
    bad([](TrainConfig& c) { c.base_lr = -1.0; });
    bad([](TrainConfig& c) { c.threads = 0; });
}

TEST(Schedule, StepDecayAndMaskedFactor) {
    TrainConfig c;
    // 0-based epochs 4, 14, 24 are the 5th, 15th and 25th epochs.
    EXPECT_NEAR(learning_rate(c, 4), 1e-4, 1e-18);
    EXPECT_NEAR(learning_rate(c, 14), 1e-5, 1e-18);
    EXPECT_NEAR(learning_rate(c, 24), 1e-6, 1e-18);
    EXPECT_EQ(learning_rate(c, 0), learning_rate(c, 9));
    c.variant = Variant::VdsrQs;
    EXPECT_NEAR(learning_rate(c, 4), 1e-4 * 4.0 / 3.0, 1e-18);
    EXPECT_NEAR(learning_rate(c, 14), 1e-5 * 4.0 / 3.0, 1e-19);
    EXPECT_NEAR(learning_rate(c, 24), 1e-6 * 4.0 / 3.0, 1e-20);
}

TEST(TrainingPatches, ScaledResidualTargets) {
    TrainConfig c = tiny_config();
    const auto data = small_dataset(1, false);
    const auto patches = training_patches(data, c);
    ASSERT_EQ(patches.size(), 9u);
    const PatchPair& p = patches[4];
    EXPECT_DOUBLE_EQ(p.input(1, 2), data[0].reconstruction(17, 18) / 255.0);
    EXPECT_DOUBLE_EQ(p.target(1, 2), (data[0].reference(17, 18) - data[0].reconstruction(17, 18)) / 255.0);
    EXPECT_TRUE(p.measured.empty());
    c.variant = Variant::VdsrQs;
    EXPECT_THROW((void)training_patches(data, c), ValidationError);
    const auto masked = training_patches(small_dataset(1, true), c);
    EXPECT_EQ(masked[0].measured.size(), 256u);
}

TEST(Train, RejectsEmptyData) {
    EXPECT_THROW((void)train({}, tiny_config()), ValidationError);
    std::vector<TrainingSample> tiny = {{Image(8, 8), Image(8, 8), std::nullopt}};
    EXPECT_THROW((void)train(tiny, tiny_config()), ValidationError);
}

TEST(Train, LogsEveryStepAndReducesLoss) {
    TrainConfig c = tiny_config();
    c.epochs = 6;
    const auto data = small_dataset(2, false);
    const auto result = train(data, c);
    // 2 images x 9 patches x 8 dihedral copies = 144 pairs, 36 steps per epoch.
    ASSERT_EQ(result.log.size(), 6u * 36u);
    EXPECT_EQ(result.log.front().epoch, 1);
    EXPECT_EQ(result.log.back().step, 216);
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 36; ++i) {
        first += result.log[static_cast<std::size_t>(i)].loss;
        last += result.log[result.log.size() - 1 - static_cast<std::size_t>(i)].loss;
    }
    EXPECT_LT(last, first);
}

TEST(Train, BitReproducibleAndThreadIndependent) {
    TrainConfig c = tiny_config();
    c.variant = Variant::VdsrQs;
    const auto data = small_dataset(2, true);
    const auto a = train(data, c);
    const auto b = train(data, c);
    c.threads = 3;
    const auto d = train(data, c);
    for (int l = 0; l < c.depth; ++l) {
        EXPECT_EQ(a.network.layers()[l].weights, b.network.layers()[l].weights);
        EXPECT_EQ(a.network.layers()[l].weights, d.network.layers()[l].weights);
        EXPECT_EQ(a.network.layers()[l].bias, d.network.layers()[l].bias);
    }
    EXPECT_EQ(a.network.variant(), Variant::VdsrQs);
    c.seed = 8;
    const auto e = train(data, c);
    EXPECT_NE(a.network.layers()[0].weights, e.network.layers()[0].weights);
}

TEST(Train, ContinuesFromInitialNetwork) {
    TrainConfig c = tiny_config();
    c.epochs = 1;
    const auto data = small_dataset(1, false);
    const Network start = Network::create(3, 4, 99);
    const auto r = train(data, c, &start);
    EXPECT_NE(r.network.layers()[0].weights, start.layers()[0].weights);
    EXPECT_LT((r.network.layers()[0].weights - start.layers()[0].weights).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Train, NonFiniteLossAborts) {
    auto data = small_dataset(1, false);
    data[0].reconstruction(3, 3) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW((void)train(data, tiny_config()), NumericError);
}

TEST(TrainLog, CsvFormat) {
    qsr::testing::TempDir dir;
    const std::vector<LogEntry> log = {{1, 1, 1e-4, 0.5}, {1, 2, 1e-4, 0.25}};
    write_training_log(log, dir / "log.csv");
    EXPECT_EQ(qsr::testing::read_bytes(dir / "log.csv"), "epoch,step,lr,loss\n1,1,0.0001,0.5\n1,2,0.0001,0.25\n");
}

}  // namespace
}  // namespace qsr::cnn
