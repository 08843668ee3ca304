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
 * @file hybrid.hpp
 * Hybrid networks: CNN feature extractor, projection to the quantum input
 * dimension, angle-embedded ansatz read out through per-qubit <Z>, and a
 * linear classification head. Training runs Adam over softmax cross-entropy
 * with adjoint-method quantum gradients; everything is seeded and
 * deterministic when run serially.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "qcostnas/ccost.hpp"
#include "qcostnas/circuit.hpp"

namespace qcostnas {

/// Synthetic 8x8 single-channel image dataset with a deterministic
/// stratified 80/20 train/validation split.
struct Dataset {
    int n_classes = 0;
    int height = 8;
    int width = 8;
    std::vector<std::vector<double>> images;  // flattened height*width
    std::vector<int> labels;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
    std::uint64_t seed = 0;
};

/// Class templates are oriented gratings (angle pi*(c+0.5)/C) with seeded
/// Gaussian pixel noise; separable enough that a small CNN clears 80%
/// validation accuracy.
Dataset make_dataset(int n_classes, int samples_per_class, std::uint64_t seed);

nlohmann::json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& doc);

struct ConvLayer {
    ConvSpec spec;
    std::vector<double> weights;  // [out_ch][in_ch][k][k]
    std::vector<double> bias;     // [out_ch]
};

struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // [out][in]
    std::vector<double> bias;     // [out]
};

struct HybridSpec {
    std::vector<ConvSpec> conv_stack;       // may be empty (quantum-only)
    std::optional<AnsatzSpec> ansatz;
    bool with_projection = true;
    int n_classes = 2;
    InputShape input{1, 8, 8};
};

/// A fully materialized hybrid network. Weight containers are public: the
/// trainer and the serializers address them directly.
struct HybridModel {
    std::vector<ConvLayer> convs;
    std::optional<DenseLayer> projection;
    std::optional<Circuit> circuit;  // embedded ansatz: inputs = n_qubits
    std::vector<double> theta;       // trainable quantum parameters
    std::optional<DenseLayer> head;
    InputShape input{1, 8, 8};
    int n_classes = 0;

    /// Seeded weight initialization over the given spec; the dimension
    /// chain (conv stack -> flatten -> projection -> qubits -> head) is
    /// validated here.
    static HybridModel build(const HybridSpec& spec, std::uint64_t seed);
};

/// Class scores for one flattened image (no softmax).
std::vector<double> forward(const HybridModel& model, std::span<const double> image);

/// classical + projection + quantum + head parameters.
std::int64_t count_all_parameters(const HybridModel& model);

/// Fraction of correctly argmax-classified samples.
double evaluate_accuracy(const HybridModel& model, const Dataset& dataset,
                         const std::vector<std::size_t>& indices);

struct TrainOptions {
    int epochs = 10;
    double lr = 0.01;
    int batch_size = 32;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double dropout_rate = 0.1;
    /// Stop after `early_stop_epochs` epochs when best validation accuracy
    /// is still below `early_stop_accuracy`.
    double early_stop_accuracy = 0.2;
    int early_stop_epochs = 2;
};

struct TrainResult {
    double best_val_accuracy = 0.0;
    std::int64_t steps_executed = 0;  // optimizer steps; feeds both cost models
    bool diverged = false;
};

/// Trains in place. A non-finite loss reports diverged with accuracy 0
/// rather than throwing, so a search loop always receives an objective.
TrainResult train(HybridModel& model, const Dataset& dataset, const TrainOptions& options,
                  std::uint64_t seed);

/// Mean loss and full gradient of one batch at the current weights,
/// without dropout; exposed so tests can finite-difference the whole model.
struct ModelGradients {
    std::vector<std::vector<double>> conv_weights;
    std::vector<std::vector<double>> conv_bias;
    std::vector<double> projection_weights;
    std::vector<double> projection_bias;
    std::vector<double> theta;
    std::vector<double> head_weights;
    std::vector<double> head_bias;
};
double loss_and_gradients(const HybridModel& model, const Dataset& dataset,
                          std::span<const std::size_t> indices, ModelGradients& out);

nlohmann::json model_to_json(const HybridModel& model);
HybridModel model_from_json(const nlohmann::json& doc);

/// Times batch training steps of the classical-only fixed-mode reference
/// CNN (median over `timed_steps` after warmup) and converts to FLOPs/s
/// per sample. The one wall-clock measurement in the system; runs once,
/// its result is shared immutably.
double measure_reference_throughput(int timed_steps = 10);


}  // namespace qcostnas
