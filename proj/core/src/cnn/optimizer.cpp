#include "qsr/cnn/optimizer.hpp"

#include <cmath>

#include "qsr/error.hpp"

namespace qsr::cnn {

namespace {

bool same_shape(const ParameterSet& a, const Network& net) {
    const auto& layers = net.layers();
    if (a.weights.size() != layers.size() || a.biases.size() != layers.size()) {
        return false;
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (a.weights[i].rows() != layers[i].weights.rows() ||
            a.weights[i].cols() != layers[i].weights.cols() ||
            a.biases[i].size() != layers[i].bias.size()) {
            return false;
        }
    }
    return true;
}

template <typename Param, typename Grad, typename Moment>
void update(Param& theta, const Grad& g, Moment& m, Moment& v, const AdamState& s, double lr,
            double c1, double c2) {
    m = s.beta1 * m + (1.0 - s.beta1) * g;
    v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
}

}  // namespace

void clip_gradients(ParameterSet& grads, double clip_value) {
    if (!(clip_value > 0.0)) {
        throw ValidationError("clip value must be positive");
    }
    for (auto& w : grads.weights) {
        w = w.cwiseMax(-clip_value).cwiseMin(clip_value);
    }
    for (auto& b : grads.biases) {
        b = b.cwiseMax(-clip_value).cwiseMin(clip_value);
    }
}

AdamState::AdamState(const Network& net)
    : first_moment(net.zero_parameters()), second_moment(net.zero_parameters()) {}

void adam_step(Network& net, const ParameterSet& grads, AdamState& state, double lr) {
    if (!same_shape(grads, net) || !same_shape(state.first_moment, net) ||
        !same_shape(state.second_moment, net)) {
        throw DimensionError("adam_step: gradient or optimizer state shape mismatch");
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        update(layers[i].weights, grads.weights[i], state.first_moment.weights[i],
               state.second_moment.weights[i], state, lr, c1, c2);
        update(layers[i].bias, grads.biases[i], state.first_moment.biases[i],
               state.second_moment.biases[i], state, lr, c1, c2);
    }
}

}  // namespace qsr::cnn
