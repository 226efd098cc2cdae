#pragma once

#include <cstdint>

#include "qsr/cnn/network.hpp"

namespace qsr::cnn {

/// Clamps every gradient element to [-clip_value, clip_value].
void clip_gradients(ParameterSet& grads, double clip_value);

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    ParameterSet first_moment;
    ParameterSet second_moment;

    AdamState() = default;
    explicit AdamState(const Network& net);
};

/// One bias-corrected Adam update of `net` in place.
/// Throws DimensionError when gradient or state shapes differ from the network.
void adam_step(Network& net, const ParameterSet& grads, AdamState& state, double lr);

}  // namespace qsr::cnn
