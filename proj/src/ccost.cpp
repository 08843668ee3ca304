// Copyright 2026 The qcostnas authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcostnas/ccost.hpp"

#include <string>

#include "qcostnas/qcost.hpp"

namespace qcostnas {

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Silu: return "silu";
        case Activation::Tanh: return "tanh";
    }
    return "?";
}

std::optional<Activation> activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "silu") return Activation::Silu;
    if (name == "tanh") return Activation::Tanh;
    return std::nullopt;
}

std::string_view pooling_name(Pooling p) {
    switch (p) {
        case Pooling::None: return "none";
        case Pooling::Max: return "max";
        case Pooling::Avg: return "avg";
    }
    return "?";
}

std::optional<Pooling> pooling_from_name(std::string_view name) {
    if (name == "none") return Pooling::None;
    if (name == "max") return Pooling::Max;
    if (name == "avg") return Pooling::Avg;
    return std::nullopt;
}

namespace {

struct Flow {
    bool spatial = true;  // still (c, h, w); false once flattened
    InputShape shape;
    std::int64_t flat = 0;

    std::int64_t features() const { return spatial ? shape.elements() : flat; }
};

std::int64_t conv_flops(const ConvSpec& conv, const InputShape& in, InputShape& out) {
    if (conv.in_ch != in.channels)
        throw InvalidArchitectureError("conv expects " + std::to_string(conv.in_ch) +
                                       " channels, input has " + std::to_string(in.channels));
    if (conv.kernel < 1 || conv.stride < 1)
        throw InvalidArchitectureError("conv kernel and stride must be positive");
    if (in.height < conv.kernel || in.width < conv.kernel)
        throw InvalidArchitectureError("conv kernel " + std::to_string(conv.kernel) +
                                       " does not fit a " + std::to_string(in.height) + "x" +
                                       std::to_string(in.width) + " input");
    out.channels = conv.out_ch;
    out.height = (in.height - conv.kernel) / conv.stride + 1;
    out.width = (in.width - conv.kernel) / conv.stride + 1;

    const std::int64_t k2 = static_cast<std::int64_t>(conv.kernel) * conv.kernel;
    std::int64_t flops = 2 * k2 * conv.in_ch * conv.out_ch *
                         static_cast<std::int64_t>(out.height) * out.width;
    flops += out.elements();  // activation
    if (conv.pooling != Pooling::None) {
        if (out.height >= 2 && out.width >= 2) {
            out.height /= 2;
            out.width /= 2;
            flops += out.elements();
        }
        // 1x1 maps pass through untouched
    }
    if (conv.dropout) flops += out.elements();
    return flops;
}

}  // namespace

std::int64_t count_flops(std::span<const ClassicalLayerSpec> stack, const InputShape& input) {
    Flow flow{true, input, 0};
    std::int64_t total = 0;
    for (const ClassicalLayerSpec& layer : stack) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer)) {
            if (!flow.spatial)
                throw InvalidArchitectureError("conv after flattening is not supported");
            InputShape out;
            total += conv_flops(*conv, flow.shape, out);
            flow.shape = out;
        } else if (const auto* linear = std::get_if<LinearSpec>(&layer)) {
            if (linear->in != flow.features())
                throw InvalidArchitectureError("linear expects " + std::to_string(linear->in) +
                                               " features, got " +
                                               std::to_string(flow.features()));
            total += 2 * static_cast<std::int64_t>(linear->in) * linear->out;
            flow.spatial = false;
            flow.flat = linear->out;
        } else {
            const auto& proj = std::get<ProjectionSpec>(layer);
            if (proj.in != flow.features())
                throw InvalidArchitectureError("projection expects " + std::to_string(proj.in) +
                                               " features, got " +
                                               std::to_string(flow.features()));
            total += 2 * static_cast<std::int64_t>(proj.in) * proj.out;
            flow.spatial = false;
            flow.flat = proj.out;
        }
    }
    return total;
}

std::int64_t training_step_flops(std::span<const ClassicalLayerSpec> stack,
                                 const InputShape& input) {
    return kTrainingStepFlopsMultiplier * count_flops(stack, input);
}

std::int64_t count_parameters(std::span<const ClassicalLayerSpec> stack,
                              const InputShape& input) {
    // walk shapes to validate chaining, then sum weights + biases
    count_flops(stack, input);
    std::int64_t total = 0;
    for (const ClassicalLayerSpec& layer : stack) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer)) {
            total += static_cast<std::int64_t>(conv->out_ch) *
                         (static_cast<std::int64_t>(conv->kernel) * conv->kernel * conv->in_ch) +
                     conv->out_ch;
        } else if (const auto* linear = std::get_if<LinearSpec>(&layer)) {
            total += static_cast<std::int64_t>(linear->out) * (linear->in + 1);
        } else {
            const auto& proj = std::get<ProjectionSpec>(layer);
            total += static_cast<std::int64_t>(proj.out) * (proj.in + 1);
        }
    }
    return total;
}

double calibrate_throughput(double f_reference, double t_measured) {
    if (!(f_reference > 0.0) || !(t_measured > 0.0))
        throw InvalidArgumentError("throughput calibration needs positive FLOPs and time");
    return f_reference / t_measured;
}

ClassicalCost classical_cost(double f_candidate, double phi_device, std::int64_t n_steps) {
    if (!(phi_device > 0.0)) throw InvalidArgumentError("phi_device must be positive");
    if (f_candidate < 0.0) throw InvalidArgumentError("candidate FLOPs must be non-negative");
    if (n_steps < 0) throw InvalidArgumentError("n_steps must be non-negative");
    ClassicalCost cost;
    cost.f_candidate = f_candidate;
    cost.phi_device = phi_device;
    cost.t_classical = f_candidate / phi_device;
    cost.t_classical_total = cost.t_classical * static_cast<double>(n_steps);
    return cost;
}

double total_cost(double t_classical_total, double t_quantum_total) {
    return t_classical_total + t_quantum_total;
}

double total_cost(const ClassicalCost& classical, const QuantumCostBreakdown& quantum) {
    return total_cost(classical.t_classical_total, quantum.t_quantum_total);
}

}  // namespace qcostnas
