#include <gtest/gtest.h>

#include <qsr/cnn/optimizer.hpp>
#include <qsr/error.hpp>

#include <cmath>

namespace qsr::cnn {
namespace {

// Single-parameter network: one 1->1 layer whose bias is the parameter under test.
Network scalar_net(double value) {
    ConvLayer l(1, 1);
    l.bias(0) = value;
    return Network({l});
}

ParameterSet bias_grad(const Network& net, double g) {
    ParameterSet p = net.zero_parameters();
    p.biases[0](0) = g;
    return p;
}

TEST(Clip, ElementWise) {
    ParameterSet g;
    g.weights.push_back(Matrix(1, 3));
    g.weights[0] << 0.05, -0.3, 0.2;
    g.biases.push_back(Vector::Zero(2));
    clip_gradients(g, 0.1);
    EXPECT_EQ(g.weights[0](0, 0), 0.05);
    EXPECT_EQ(g.weights[0](0, 1), -0.1);
    EXPECT_EQ(g.weights[0](0, 2), 0.1);
    EXPECT_TRUE(g.biases[0].isZero(0.0));
    const ParameterSet once = g;
    clip_gradients(g, 0.1);
    EXPECT_EQ(g.weights[0], once.weights[0]);
    EXPECT_THROW(clip_gradients(g, 0.0), ValidationError);
}

TEST(Adam, ZeroGradientFromFreshStateIsNoOp) {
    Network net = Network::create(3, 4, 1);
    const Network before = net;
    AdamState state(net);
    adam_step(net, net.zero_parameters(), state, 1e-3);
    EXPECT_EQ(state.step, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(net.layers()[i].weights, before.layers()[i].weights);
    }
}

TEST(Adam, FirstStepClosedForm) {
    for (double g : {0.37, -2.5, 1e-6}) {
        Network net = scalar_net(1.0);
        AdamState state(net);
        const double lr = 1e-3;
        adam_step(net, bias_grad(net, g), state, lr);
        // m_hat = g, v_hat = g^2 after bias correction.
        const double expected = 1.0 - lr * g / (std::abs(g) + 1e-8);
        EXPECT_NEAR(net.layers()[0].bias(0), expected, 1e-15);
    }
}

TEST(Adam, ConstantPositiveGradientDecreasesMonotonically) {
    Network net = scalar_net(0.0);
    AdamState state(net);
    double previous = 0.0;
    for (int k = 0; k < 10; ++k) {
        adam_step(net, bias_grad(net, 0.25), state, 1e-2);
        const double now = net.layers()[0].bias(0);
        EXPECT_LT(now, previous);
        previous = now;
    }
}

TEST(Adam, ClippedFirstStepIsBoundedByLearningRate) {
    Network net = Network::create(3, 4, 2);
    AdamState state(net);
    const double lr = 1e-3;
    ParameterSet g = net.zero_parameters();
    for (auto& w : g.weights) {
        w.setRandom();
        w *= 10.0;
    }
    clip_gradients(g, 0.1);
    const Network before = net;
    adam_step(net, g, state, lr);
    for (std::size_t i = 0; i < 3; ++i) {
        const double delta = (net.layers()[i].weights - before.layers()[i].weights).cwiseAbs().maxCoeff();
        EXPECT_LE(delta, lr * 0.1 / (std::sqrt(0.1 * 0.1) + 1e-8) * (1.0 + 1e-12));
    }
}

TEST(Adam, LaterStepsStayWithinWorstCaseBound) {
    // |m_hat| / sqrt(v_hat) never exceeds (1 - beta1) / sqrt(1 - beta2).
    Network net = Network::create(3, 4, 2);
    AdamState state(net);
    const double lr = 1e-3;
    const double bound = lr * (1.0 - 0.9) / std::sqrt(1.0 - 0.999);
    for (int k = 0; k < 30; ++k) {
        ParameterSet g = net.zero_parameters();
        for (auto& w : g.weights) {
            w.setRandom();
            w *= k % 7 == 6 ? 10.0 : 1e-3;
        }
        clip_gradients(g, 0.1);
        const Network before = net;
        adam_step(net, g, state, lr);
        for (std::size_t i = 0; i < 3; ++i) {
            const double delta = (net.layers()[i].weights - before.layers()[i].weights).cwiseAbs().maxCoeff();
            EXPECT_LE(delta, bound * (1.0 + 1e-12));
        }
    }
}

TEST(Adam, ShapeMismatchRejected) {
    Network net = Network::create(3, 4, 3);
    AdamState state(net);
    EXPECT_THROW(adam_step(net, Network::create(2, 4, 0).zero_parameters(), state, 1e-3),
                 DimensionError);
}

}  // namespace
}  // namespace qsr::cnn
