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

/**
 * @file ccost.hpp
 * Classical cost model: exact FLOPs counting over the CNN/linear search
 * space and conversion into device time through a measured throughput.
 *
 * Conventions (fixed so numbers reproduce): one MAC = 2 FLOPs; activations,
 * pooling and dropout cost 1 FLOP per output element; convolutions use valid
 * padding; biases are excluded from FLOPs but included in parameter counts;
 * a training step costs kTrainingStepFlopsMultiplier forward passes.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qcostnas/errors.hpp"

namespace qcostnas {

enum class Activation { Relu, Silu, Tanh };
enum class Pooling { None, Max, Avg };

std::string_view activation_name(Activation a);
std::optional<Activation> activation_from_name(std::string_view name);
std::string_view pooling_name(Pooling p);
std::optional<Pooling> pooling_from_name(std::string_view name);

struct ConvSpec {
    int in_ch = 1;
    int out_ch = 8;
    int kernel = 3;
    int stride = 1;
    Activation activation = Activation::Relu;
    Pooling pooling = Pooling::None;  // 2x2 window, stride 2
    bool dropout = false;             // rate 0.1 when applied

    bool operator==(const ConvSpec&) const = default;
};

struct LinearSpec {
    int in = 0;
    int out = 0;
    bool operator==(const LinearSpec&) const = default;
};

/// Maps the flattened classical features to the quantum input dimension.
struct ProjectionSpec {
    int in = 0;
    int out = 0;  // = n_qubits
    bool operator==(const ProjectionSpec&) const = default;
};

using ClassicalLayerSpec = std::variant<ConvSpec, LinearSpec, ProjectionSpec>;

struct InputShape {
    int channels = 1;
    int height = 8;
    int width = 8;
    std::int64_t elements() const {
        return static_cast<std::int64_t>(channels) * height * width;
    }
};

/// Forward-pass FLOPs of the stack on the given input. Quantum layers are
/// not classical layers and contribute nothing here. Throws
/// InvalidArchitectureError when the shape arithmetic does not chain.
std::int64_t count_flops(std::span<const ClassicalLayerSpec> stack, const InputShape& input);

/// Forward + backward + update, expressed as a multiple of forward FLOPs.
inline constexpr int kTrainingStepFlopsMultiplier = 3;

std::int64_t training_step_flops(std::span<const ClassicalLayerSpec> stack,
                                 const InputShape& input);

/// Trainable parameter count of the stack (weights + biases).
std::int64_t count_parameters(std::span<const ClassicalLayerSpec> stack, const InputShape& input);

/// Device throughput in FLOPs/s from a timed reference training step.
double calibrate_throughput(double f_reference, double t_measured);

struct ClassicalCost {
    double f_candidate = 0.0;        // FLOPs per training step
    double phi_device = 0.0;         // FLOPs per second
    double t_classical = 0.0;        // seconds per step
    double t_classical_total = 0.0;  // seconds over n_steps
};

ClassicalCost classical_cost(double f_candidate, double phi_device, std::int64_t n_steps);

/// Unified time-based cost: classical plus quantum totals in seconds.
struct QuantumCostBreakdown;
double total_cost(double t_classical_total, double t_quantum_total);
double total_cost(const ClassicalCost& classical, const QuantumCostBreakdown& quantum);

}  // namespace qcostnas
