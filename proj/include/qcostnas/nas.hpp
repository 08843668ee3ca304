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
 * @file nas.hpp
 * NSGA-II architecture search over hybrid genomes in fixed-CNN and
 * variable-CNN modes. Objectives, all minimized:
 * (1 - accuracy, T_quantum_total, T_classical_total, Params_total).
 *
 * Generation-synchronous: candidate evaluations within a generation are
 * independent (results are keyed and merged by genome, so a worker pool
 * would reproduce the serial archive); selection is a serial barrier.
 */

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcostnas/backend.hpp"
#include "qcostnas/ccost.hpp"
#include "qcostnas/circuit.hpp"
#include "qcostnas/hybrid.hpp"
#include "qcostnas/qcost.hpp"
#include "qcostnas/rng.hpp"

namespace qcostnas {

enum class SearchMode { Fixed, Variable };

std::string_view search_mode_name(SearchMode mode);
std::optional<SearchMode> search_mode_from_name(std::string_view name);

/// Classical genes of one conv layer (input channels are chained, not
/// encoded).
struct ConvGene {
    int out_ch = 16;
    int kernel = 3;
    Activation activation = Activation::Relu;
    Pooling pooling = Pooling::None;
    bool dropout = false;

    bool operator==(const ConvGene&) const = default;
};

struct Genome {
    int n_qubits = 2;
    int depth = 1;
    std::vector<GateKind> rotation_kinds = {GateKind::Ry};  // sorted, non-empty
    GateKind entangler = GateKind::Cnot;
    Topology topology = Topology::Linear;
    std::vector<ConvGene> conv;  // empty in fixed mode

    bool operator==(const Genome&) const = default;
};

nlohmann::json genome_to_json(const Genome& genome);
Genome genome_from_json(const nlohmann::json& doc);
/// Canonical key: the sorted-key JSON dump; used for caching and seeding.
std::string genome_key(const Genome& genome);

/// Gene bounds; defaults are the full search space. Categorical lists are
/// sampled uniformly; ordinal ranges mutate by one step with reflection.
struct SearchSpace {
    int qubits_min = 2, qubits_max = 12;
    int depth_min = 1, depth_max = 15;
    std::vector<GateKind> rotation_kinds = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
    std::vector<GateKind> entanglers = {GateKind::Cnot, GateKind::Cz};
    std::vector<Topology> topologies = {Topology::Linear, Topology::Circular, Topology::Full,
                                        Topology::Star, Topology::Grid};
    int conv_layers_min = 1, conv_layers_max = 3;
    std::vector<int> out_channels = {8, 16, 32, 64};
    std::vector<int> kernels = {3, 5, 7};
    std::vector<Activation> activations = {Activation::Relu, Activation::Silu,
                                           Activation::Tanh};
    std::vector<Pooling> poolings = {Pooling::None, Pooling::Avg};
    std::vector<bool> dropout_options = {false, true};
};

Genome random_genome(SearchMode mode, const SearchSpace& space, Rng& rng);
/// Uniform per-gene choice from either parent; parents must share a mode.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);
/// Each gene independently perturbed with probability p_m: ordinal genes
/// step +-1 with reflection at the bounds, categorical genes resample.
Genome mutate(const Genome& genome, double p_m, const SearchSpace& space, Rng& rng);

/// Objective vector, all minimized.
struct Objectives {
    double error = 0.0;              // 1 - validation accuracy
    double t_quantum_total = 0.0;    // seconds
    double t_classical_total = 0.0;  // seconds
    double params_total = 0.0;

    std::array<double, 4> as_array() const {
        return {error, t_quantum_total, t_classical_total, params_total};
    }
};

/// a dominates b: <= everywhere, < somewhere.
bool dominates(const std::array<double, 4>& a, const std::array<double, 4>& b);

/// Deb's fast non-dominated sort; fronts hold indices, ties share a front.
std::vector<std::vector<int>> fast_nondominated_sort(
    std::span<const std::array<double, 4>> points);

/// Standard crowding distance within one front: boundary points get
/// +infinity, interior points the normalized neighbor-gap sum;
/// zero-range objectives contribute 0.
std::vector<double> crowding_distance(std::span<const std::array<double, 4>> front);

/// NSGA-II truncation: fill by front rank, break the last front by
/// descending crowding distance (index ascending on exact ties).
std::vector<int> environmental_selection(std::span<const std::array<double, 4>> points,
                                         int target);

struct RankInfo {
    std::vector<int> rank;        // 1-based front rank per point
    std::vector<double> crowding;
};
RankInfo rank_population(std::span<const std::array<double, 4>> points);

/// Binary tournament with replacement on (rank, crowding, index).
int binary_tournament(const RankInfo& info, Rng& rng);

/// Sentinel quantum cost for genomes whose failure probability saturates
/// the cost model; keeps every objective finite.
inline constexpr double kSaturatedQuantumCost = 1e15;

struct EvaluatedGenome {
    Genome genome;
    Objectives objectives;
    double accuracy = 0.0;
    std::int64_t n_steps = 0;
    std::int64_t quantum_params = 0;
    std::optional<QuantumCostBreakdown> quantum_cost;  // absent when saturated
    ClassicalCost classical_cost;
    bool diverged = false;
    bool reliability_saturated = false;
    int first_generation = 0;
    std::string key;
};

struct GenerationRecord {
    std::vector<EvaluatedGenome> population;
    std::vector<int> ranks;          // within this population
    std::vector<double> crowding;
};

struct ParetoArchive {
    std::vector<GenerationRecord> generations;
    /// Non-dominated set over every genome evaluated in the run; mutually
    /// non-dominated by construction.
    std::vector<EvaluatedGenome> final_front;
};

nlohmann::json archive_to_json(const ParetoArchive& archive);
ParetoArchive archive_from_json(const nlohmann::json& doc);
nlohmann::json evaluated_to_json(const EvaluatedGenome& eval);
EvaluatedGenome evaluated_from_json(const nlohmann::json& doc);

struct SearchConfig {
    SearchMode mode = SearchMode::Fixed;
    std::string backend = "fake_linear7";
    std::uint64_t seed = 1;
    int generations = 8;  // total, including the random initial one
    int population = 12;
    double mutation_probability = 0.4;
    SearchSpace space;
    std::vector<ConvGene> fixed_cnn = {
        {16, 3, Activation::Relu, Pooling::Max, true}};
    int dataset_classes = 4;
    int dataset_samples_per_class = 100;
    std::uint64_t dataset_seed = 1;
    TrainOptions training;
    /// FLOPs/s used by the classical model; when unset the search measures
    /// it at startup (timing-based, not reproducible across machines).
    std::optional<double> phi_device = 2e10;
    /// Overrides the QCOSTNAS_CACHE_DIR environment variable when set.
    std::optional<std::string> cache_dir;
};

SearchConfig search_config_from_json(const nlohmann::json& doc);
nlohmann::json search_config_to_json(const SearchConfig& config);

/// Decodes a genome into a trainable spec. In variable mode, conv genes
/// that do not fit the running 8x8 shape under valid padding are truncated.
HybridSpec decode_genome(const Genome& genome, const SearchConfig& config);

/// Conv stack as classical layer specs (the classical-time objective covers
/// the feature extractor; projection and head vary with n_qubits and are
/// counted in Params_total instead).
std::vector<ClassicalLayerSpec> classical_stack(const HybridSpec& spec);

using Evaluator = std::function<EvaluatedGenome(const Genome&, int generation)>;

/// Full NSGA-II loop; aborts before any training when the backend fails to
/// load or the qubit range exceeds the device.
ParetoArchive run_search(const SearchConfig& config);

/// The evaluator run_search uses; exposed for the train-one command.
EvaluatedGenome evaluate_genome(const Genome& genome, const SearchConfig& config,
                                const BackendModel& backend, const Dataset& dataset,
                                double phi_device);

}  // namespace qcostnas
