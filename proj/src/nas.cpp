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

#include "qcostnas/nas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "qcostnas/transpiler.hpp"

namespace qcostnas {

std::string_view search_mode_name(SearchMode mode) {
    return mode == SearchMode::Fixed ? "fixed" : "variable";
}

std::optional<SearchMode> search_mode_from_name(std::string_view name) {
    if (name == "fixed") return SearchMode::Fixed;
    if (name == "variable") return SearchMode::Variable;
    return std::nullopt;
}

namespace {

using nlohmann::json;

json conv_gene_to_json(const ConvGene& gene) {
    return {{"out_ch", gene.out_ch},
            {"kernel", gene.kernel},
            {"activation", std::string(activation_name(gene.activation))},
            {"pooling", std::string(pooling_name(gene.pooling))},
            {"dropout", gene.dropout}};
}

ConvGene conv_gene_from_json(const json& doc) {
    ConvGene gene;
    gene.out_ch = doc.at("out_ch").get<int>();
    gene.kernel = doc.at("kernel").get<int>();
    const auto act = activation_from_name(doc.at("activation").get<std::string>());
    const auto pool = pooling_from_name(doc.at("pooling").get<std::string>());
    if (!act || !pool) throw InvalidArgumentError("bad conv gene");
    gene.activation = *act;
    gene.pooling = *pool;
    gene.dropout = doc.at("dropout").get<bool>();
    return gene;
}

void sort_rotation_kinds(std::vector<GateKind>& kinds) {
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
}

template <class T>
T pick(const std::vector<T>& options, Rng& rng) {
    if (options.empty()) throw InvalidArgumentError("empty gene option list");
    return options[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(options.size()) - 1))];
}

/// +-1 with reflection at the bounds; a degenerate range is a fixed point.
int step_ordinal(int value, int lo, int hi, Rng& rng) {
    if (lo >= hi) return value;
    int next = value + (rng.bernoulli(0.5) ? 1 : -1);
    if (next > hi) next = 2 * hi - next;
    if (next < lo) next = 2 * lo - next;
    return next;
}

int index_of(const std::vector<int>& options, int value) {
    const auto it = std::find(options.begin(), options.end(), value);
    if (it == options.end()) return 0;
    return static_cast<int>(it - options.begin());
}

std::vector<GateKind> random_rotation_subset(const std::vector<GateKind>& options, Rng& rng) {
    const std::int64_t full = (std::int64_t{1} << options.size()) - 1;
    const std::int64_t mask = rng.uniform_int(1, full);
    std::vector<GateKind> subset;
    for (std::size_t i = 0; i < options.size(); ++i)
        if (mask & (std::int64_t{1} << i)) subset.push_back(options[i]);
    sort_rotation_kinds(subset);
    return subset;
}

ConvGene random_conv_gene(const SearchSpace& space, Rng& rng) {
    ConvGene gene;
    gene.out_ch = pick(space.out_channels, rng);
    gene.kernel = pick(space.kernels, rng);
    gene.activation = pick(space.activations, rng);
    gene.pooling = pick(space.poolings, rng);
    gene.dropout = pick(space.dropout_options, rng);
    return gene;
}

bool pool_applies(Pooling pooling, int h, int w) {
    return pooling != Pooling::None && h >= 2 && w >= 2;
}

/// Chains conv genes into specs over the running input shape. When
/// `truncate` is set, genes that no longer fit are dropped; otherwise a
/// non-fitting gene is an architecture error.
std::vector<ConvSpec> realize_conv_stack(const std::vector<ConvGene>& genes, InputShape shape,
                                         bool truncate) {
    std::vector<ConvSpec> stack;
    for (const ConvGene& gene : genes) {
        if (shape.height < gene.kernel || shape.width < gene.kernel) {
            if (truncate) break;
            throw InvalidArchitectureError("fixed CNN does not fit the input image");
        }
        ConvSpec spec;
        spec.in_ch = shape.channels;
        spec.out_ch = gene.out_ch;
        spec.kernel = gene.kernel;
        spec.stride = 1;
        spec.activation = gene.activation;
        spec.pooling = gene.pooling;
        spec.dropout = gene.dropout;
        stack.push_back(spec);
        shape.channels = gene.out_ch;
        shape.height = shape.height - gene.kernel + 1;
        shape.width = shape.width - gene.kernel + 1;
        if (pool_applies(gene.pooling, shape.height, shape.width)) {
            shape.height /= 2;
            shape.width /= 2;
        }
    }
    return stack;
}

json eval_to_json(const EvaluatedGenome& eval) {
    json doc{{"genome", genome_to_json(eval.genome)},
             {"objectives",
              {{"error", eval.objectives.error},
               {"t_quantum_total", eval.objectives.t_quantum_total},
               {"t_classical_total", eval.objectives.t_classical_total},
               {"params_total", eval.objectives.params_total}}},
             {"accuracy", eval.accuracy},
             {"n_steps", eval.n_steps},
             {"quantum_params", eval.quantum_params},
             {"ccost",
              {{"f_candidate", eval.classical_cost.f_candidate},
               {"phi_device", eval.classical_cost.phi_device},
               {"t_classical", eval.classical_cost.t_classical},
               {"t_classical_total", eval.classical_cost.t_classical_total}}},
             {"diverged", eval.diverged},
             {"reliability_saturated", eval.reliability_saturated},
             {"first_generation", eval.first_generation}};
    if (eval.quantum_cost) doc["qcost"] = to_json(*eval.quantum_cost);
    return doc;
}

EvaluatedGenome eval_from_json(const json& doc) {
    EvaluatedGenome eval;
    eval.genome = genome_from_json(doc.at("genome"));
    eval.key = genome_key(eval.genome);
    const json& obj = doc.at("objectives");
    eval.objectives.error = obj.at("error").get<double>();
    eval.objectives.t_quantum_total = obj.at("t_quantum_total").get<double>();
    eval.objectives.t_classical_total = obj.at("t_classical_total").get<double>();
    eval.objectives.params_total = obj.at("params_total").get<double>();
    eval.accuracy = doc.at("accuracy").get<double>();
    eval.n_steps = doc.at("n_steps").get<std::int64_t>();
    eval.quantum_params = doc.at("quantum_params").get<std::int64_t>();
    const json& cc = doc.at("ccost");
    eval.classical_cost.f_candidate = cc.at("f_candidate").get<double>();
    eval.classical_cost.phi_device = cc.at("phi_device").get<double>();
    eval.classical_cost.t_classical = cc.at("t_classical").get<double>();
    eval.classical_cost.t_classical_total = cc.at("t_classical_total").get<double>();
    eval.diverged = doc.at("diverged").get<bool>();
    eval.reliability_saturated = doc.at("reliability_saturated").get<bool>();
    eval.first_generation = doc.at("first_generation").get<int>();
    if (doc.contains("qcost")) eval.quantum_cost = quantum_cost_from_json(doc.at("qcost"));
    return eval;
}

void check_objectives(const Objectives& objectives) {
    for (double v : objectives.as_array())
        if (!std::isfinite(v) || v < 0.0)
            throw Error("objective vector must be finite and non-negative");
}

}  // namespace

nlohmann::json evaluated_to_json(const EvaluatedGenome& eval) { return eval_to_json(eval); }
EvaluatedGenome evaluated_from_json(const nlohmann::json& doc) { return eval_from_json(doc); }

json genome_to_json(const Genome& genome) {
    json doc{{"n_qubits", genome.n_qubits},
             {"depth", genome.depth},
             {"entangler", std::string(gate_name(genome.entangler))},
             {"topology", std::string(topology_name(genome.topology))}};
    json kinds = json::array();
    for (GateKind k : genome.rotation_kinds) kinds.push_back(std::string(gate_name(k)));
    doc["rotation_kinds"] = kinds;
    if (!genome.conv.empty()) {
        json conv = json::array();
        for (const ConvGene& gene : genome.conv) conv.push_back(conv_gene_to_json(gene));
        doc["conv"] = conv;
    }
    return doc;
}

Genome genome_from_json(const json& doc) {
    Genome genome;
    genome.n_qubits = doc.at("n_qubits").get<int>();
    genome.depth = doc.at("depth").get<int>();
    genome.rotation_kinds.clear();
    for (const auto& name : doc.at("rotation_kinds")) {
        const auto kind = gate_from_name(name.get<std::string>());
        if (!kind || !is_rotation(*kind)) throw InvalidArgumentError("bad rotation kind");
        genome.rotation_kinds.push_back(*kind);
    }
    sort_rotation_kinds(genome.rotation_kinds);
    if (genome.rotation_kinds.empty())
        throw InvalidArgumentError("genome needs at least one rotation kind");
    const auto ent = gate_from_name(doc.at("entangler").get<std::string>());
    if (!ent || (*ent != GateKind::Cnot && *ent != GateKind::Cz))
        throw InvalidArgumentError("bad entangler");
    genome.entangler = *ent;
    const auto topo = topology_from_name(doc.at("topology").get<std::string>());
    if (!topo) throw InvalidArgumentError("bad topology");
    genome.topology = *topo;
    if (doc.contains("conv"))
        for (const auto& g : doc.at("conv")) genome.conv.push_back(conv_gene_from_json(g));
    return genome;
}

std::string genome_key(const Genome& genome) { return genome_to_json(genome).dump(); }

Genome random_genome(SearchMode mode, const SearchSpace& space, Rng& rng) {
    Genome genome;
    genome.n_qubits = static_cast<int>(rng.uniform_int(space.qubits_min, space.qubits_max));
    genome.depth = static_cast<int>(rng.uniform_int(space.depth_min, space.depth_max));
    genome.rotation_kinds = random_rotation_subset(space.rotation_kinds, rng);
    genome.entangler = pick(space.entanglers, rng);
    genome.topology = pick(space.topologies, rng);
    if (mode == SearchMode::Variable) {
        const int n_conv =
            static_cast<int>(rng.uniform_int(space.conv_layers_min, space.conv_layers_max));
        for (int i = 0; i < n_conv; ++i) genome.conv.push_back(random_conv_gene(space, rng));
    }
    return genome;
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    if (a.conv.empty() != b.conv.empty())
        throw InvalidArgumentError("crossover needs parents from the same mode");
    Genome child;
    child.n_qubits = rng.bernoulli(0.5) ? a.n_qubits : b.n_qubits;
    child.depth = rng.bernoulli(0.5) ? a.depth : b.depth;
    child.rotation_kinds = rng.bernoulli(0.5) ? a.rotation_kinds : b.rotation_kinds;
    child.entangler = rng.bernoulli(0.5) ? a.entangler : b.entangler;
    child.topology = rng.bernoulli(0.5) ? a.topology : b.topology;
    const std::size_t n_conv = rng.bernoulli(0.5) ? a.conv.size() : b.conv.size();
    for (std::size_t i = 0; i < n_conv; ++i) {
        const bool has_a = i < a.conv.size();
        const bool has_b = i < b.conv.size();
        if (has_a && has_b) {
            ConvGene gene;
            gene.out_ch = rng.bernoulli(0.5) ? a.conv[i].out_ch : b.conv[i].out_ch;
            gene.kernel = rng.bernoulli(0.5) ? a.conv[i].kernel : b.conv[i].kernel;
            gene.activation = rng.bernoulli(0.5) ? a.conv[i].activation : b.conv[i].activation;
            gene.pooling = rng.bernoulli(0.5) ? a.conv[i].pooling : b.conv[i].pooling;
            gene.dropout = rng.bernoulli(0.5) ? a.conv[i].dropout : b.conv[i].dropout;
            child.conv.push_back(gene);
        } else {
            child.conv.push_back(has_a ? a.conv[i] : b.conv[i]);
        }
    }
    return child;
}

Genome mutate(const Genome& genome, double p_m, const SearchSpace& space, Rng& rng) {
    Genome out = genome;
    if (rng.bernoulli(p_m))
        out.n_qubits = step_ordinal(out.n_qubits, space.qubits_min, space.qubits_max, rng);
    if (rng.bernoulli(p_m))
        out.depth = step_ordinal(out.depth, space.depth_min, space.depth_max, rng);
    if (rng.bernoulli(p_m)) out.rotation_kinds = random_rotation_subset(space.rotation_kinds, rng);
    if (rng.bernoulli(p_m)) out.entangler = pick(space.entanglers, rng);
    if (rng.bernoulli(p_m)) out.topology = pick(space.topologies, rng);
    if (!genome.conv.empty() || !out.conv.empty()) {
        if (rng.bernoulli(p_m)) {
            const int n_conv = step_ordinal(static_cast<int>(out.conv.size()),
                                            space.conv_layers_min, space.conv_layers_max, rng);
            while (static_cast<int>(out.conv.size()) > n_conv) out.conv.pop_back();
            while (static_cast<int>(out.conv.size()) < n_conv)
                out.conv.push_back(random_conv_gene(space, rng));
        }
        for (ConvGene& gene : out.conv) {
            if (rng.bernoulli(p_m)) {
                const int idx =
                    step_ordinal(index_of(space.out_channels, gene.out_ch), 0,
                                 static_cast<int>(space.out_channels.size()) - 1, rng);
                gene.out_ch = space.out_channels[static_cast<std::size_t>(idx)];
            }
            if (rng.bernoulli(p_m)) {
                const int idx = step_ordinal(index_of(space.kernels, gene.kernel), 0,
                                             static_cast<int>(space.kernels.size()) - 1, rng);
                gene.kernel = space.kernels[static_cast<std::size_t>(idx)];
            }
            if (rng.bernoulli(p_m)) gene.activation = pick(space.activations, rng);
            if (rng.bernoulli(p_m)) gene.pooling = pick(space.poolings, rng);
            if (rng.bernoulli(p_m)) gene.dropout = pick(space.dropout_options, rng);
        }
    }
    return out;
}

bool dominates(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    bool strict = false;
    for (int i = 0; i < 4; ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

std::vector<std::vector<int>> fast_nondominated_sort(
    std::span<const std::array<double, 4>> points) {
    const int n = static_cast<int>(points.size());
    std::vector<std::vector<int>> dominated_by(static_cast<std::size_t>(n));
    std::vector<int> domination_count(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> fronts;
    std::vector<int> first;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[static_cast<std::size_t>(p)],
                          points[static_cast<std::size_t>(q)]))
                dominated_by[static_cast<std::size_t>(p)].push_back(q);
            else if (dominates(points[static_cast<std::size_t>(q)],
                               points[static_cast<std::size_t>(p)]))
                ++domination_count[static_cast<std::size_t>(p)];
        }
        if (domination_count[static_cast<std::size_t>(p)] == 0) first.push_back(p);
    }
    fronts.push_back(std::move(first));
    std::size_t current = 0;
    while (current < fronts.size() && !fronts[current].empty()) {
        std::vector<int> next;
        for (int p : fronts[current]) {
            for (int q : dominated_by[static_cast<std::size_t>(p)]) {
                if (--domination_count[static_cast<std::size_t>(q)] == 0) next.push_back(q);
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
        ++current;
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const std::array<double, 4>> front) {
    const std::size_t n = front.size();
    if (n == 0) throw InvalidArgumentError("crowding distance of an empty front");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }
    std::vector<int> order(n);
    for (int m = 0; m < 4; ++m) {
        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return front[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] <
                   front[static_cast<std::size_t>(b)][static_cast<std::size_t>(m)];
        });
        const double lo = front[static_cast<std::size_t>(order.front())][static_cast<std::size_t>(m)];
        const double hi = front[static_cast<std::size_t>(order.back())][static_cast<std::size_t>(m)];
        distance[static_cast<std::size_t>(order.front())] = inf;
        distance[static_cast<std::size_t>(order.back())] = inf;
        const double range = hi - lo;
        if (range <= 0.0) continue;  // zero-range objective contributes 0
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double prev = front[static_cast<std::size_t>(order[i - 1])][static_cast<std::size_t>(m)];
            const double next = front[static_cast<std::size_t>(order[i + 1])][static_cast<std::size_t>(m)];
            if (std::isinf(distance[static_cast<std::size_t>(order[i])])) continue;
            distance[static_cast<std::size_t>(order[i])] += (next - prev) / range;
        }
    }
    return distance;
}

RankInfo rank_population(std::span<const std::array<double, 4>> points) {
    RankInfo info;
    info.rank.assign(points.size(), 0);
    info.crowding.assign(points.size(), 0.0);
    const auto fronts = fast_nondominated_sort(points);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<std::array<double, 4>> subset;
        subset.reserve(fronts[f].size());
        for (int idx : fronts[f]) subset.push_back(points[static_cast<std::size_t>(idx)]);
        const auto distances = crowding_distance(subset);
        for (std::size_t i = 0; i < fronts[f].size(); ++i) {
            info.rank[static_cast<std::size_t>(fronts[f][i])] = static_cast<int>(f) + 1;
            info.crowding[static_cast<std::size_t>(fronts[f][i])] = distances[i];
        }
    }
    return info;
}

std::vector<int> environmental_selection(std::span<const std::array<double, 4>> points,
                                         int target) {
    if (target < 0 || target > static_cast<int>(points.size()))
        throw InvalidArgumentError("selection target out of range");
    const auto fronts = fast_nondominated_sort(points);
    std::vector<int> selected;
    selected.reserve(static_cast<std::size_t>(target));
    for (const auto& front : fronts) {
        if (static_cast<int>(selected.size() + front.size()) <= target) {
            selected.insert(selected.end(), front.begin(), front.end());
            if (static_cast<int>(selected.size()) == target) break;
            continue;
        }
        std::vector<std::array<double, 4>> subset;
        subset.reserve(front.size());
        for (int idx : front) subset.push_back(points[static_cast<std::size_t>(idx)]);
        const auto distances = crowding_distance(subset);
        std::vector<int> order(front.size());
        for (std::size_t i = 0; i < front.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return distances[static_cast<std::size_t>(a)] >
                                                    distances[static_cast<std::size_t>(b)]; });
        for (int i : order) {
            if (static_cast<int>(selected.size()) == target) break;
            selected.push_back(front[static_cast<std::size_t>(i)]);
        }
        break;
    }
    return selected;
}

int binary_tournament(const RankInfo& info, Rng& rng) {
    const std::int64_t n = static_cast<std::int64_t>(info.rank.size());
    const int a = static_cast<int>(rng.uniform_int(0, n - 1));
    const int b = static_cast<int>(rng.uniform_int(0, n - 1));
    const auto better = [&](int x, int y) {
        if (info.rank[static_cast<std::size_t>(x)] != info.rank[static_cast<std::size_t>(y)])
            return info.rank[static_cast<std::size_t>(x)] < info.rank[static_cast<std::size_t>(y)];
        if (info.crowding[static_cast<std::size_t>(x)] != info.crowding[static_cast<std::size_t>(y)])
            return info.crowding[static_cast<std::size_t>(x)] >
                   info.crowding[static_cast<std::size_t>(y)];
        return x < y;
    };
    return better(a, b) ? a : b;
}

HybridSpec decode_genome(const Genome& genome, const SearchConfig& config) {
    HybridSpec spec;
    spec.input = {1, 8, 8};
    spec.n_classes = config.dataset_classes;
    const std::vector<ConvGene>& genes =
        config.mode == SearchMode::Fixed ? config.fixed_cnn : genome.conv;
    spec.conv_stack =
        realize_conv_stack(genes, spec.input, /*truncate=*/config.mode == SearchMode::Variable);
    spec.ansatz = AnsatzSpec{genome.n_qubits, genome.depth, genome.rotation_kinds,
                             genome.entangler, genome.topology};
    spec.with_projection = true;
    return spec;
}

std::vector<ClassicalLayerSpec> classical_stack(const HybridSpec& spec) {
    std::vector<ClassicalLayerSpec> stack;
    stack.reserve(spec.conv_stack.size());
    for (const ConvSpec& conv : spec.conv_stack) stack.push_back(conv);
    return stack;
}

EvaluatedGenome evaluate_genome(const Genome& genome, const SearchConfig& config,
                                const BackendModel& backend, const Dataset& dataset,
                                double phi_device) {
    EvaluatedGenome out;
    out.genome = genome;
    out.key = genome_key(genome);
    const HybridSpec spec = decode_genome(genome, config);
    const std::uint64_t genome_seed = hash_string64(out.key, config.seed);
    HybridModel model = HybridModel::build(spec, hash_combine64(genome_seed, 1));
    const TrainResult trained =
        train(model, dataset, config.training, hash_combine64(genome_seed, 2));
    out.diverged = trained.diverged;
    out.accuracy = trained.diverged ? 0.0 : trained.best_val_accuracy;
    out.n_steps = trained.steps_executed;
    out.quantum_params = model.circuit->n_params();

    const TranspiledCircuit transpiled = transpile(*model.circuit, backend);
    double t_quantum_total = 0.0;
    try {
        out.quantum_cost = quantum_training_cost(transpiled, backend.calibration,
                                                 {out.quantum_params, out.n_steps});
        t_quantum_total = out.quantum_cost->t_quantum_total;
    } catch (const ReliabilitySaturatedError&) {
        out.reliability_saturated = true;
        t_quantum_total = kSaturatedQuantumCost;
    }

    const auto stack = classical_stack(spec);
    out.classical_cost = classical_cost(
        static_cast<double>(training_step_flops(stack, spec.input)), phi_device, out.n_steps);

    out.objectives.error = 1.0 - out.accuracy;
    out.objectives.t_quantum_total = t_quantum_total;
    out.objectives.t_classical_total = out.classical_cost.t_classical_total;
    out.objectives.params_total = static_cast<double>(count_all_parameters(model));
    check_objectives(out.objectives);
    return out;
}

namespace {

GenerationRecord make_record(std::vector<EvaluatedGenome> population) {
    GenerationRecord record;
    std::vector<std::array<double, 4>> objs;
    objs.reserve(population.size());
    for (const auto& e : population) objs.push_back(e.objectives.as_array());
    const RankInfo info = rank_population(objs);
    record.population = std::move(population);
    record.ranks = info.rank;
    record.crowding = info.crowding;
    return record;
}

class EvaluationCache {
  public:
    EvaluationCache(const SearchConfig& config, const BackendModel& backend) {
        if (config.cache_dir) {
            dir_ = *config.cache_dir;
        } else if (const char* env = std::getenv("QCOSTNAS_CACHE_DIR"); env && *env) {
            dir_ = env;
        }
        if (!dir_.empty()) {
            std::filesystem::create_directories(dir_);
            // results depend on everything below; keep foreign configs apart
            json fp{{"backend", backend_to_json(backend)},
                    {"mode", std::string(search_mode_name(config.mode))},
                    {"seed", config.seed},
                    {"dataset",
                     {{"classes", config.dataset_classes},
                      {"samples", config.dataset_samples_per_class},
                      {"seed", config.dataset_seed}}},
                    {"training",
                     {{"epochs", config.training.epochs},
                      {"lr", config.training.lr},
                      {"batch", config.training.batch_size}}},
                    {"fixed_cnn", json::array()}};
            for (const ConvGene& g : config.fixed_cnn) fp["fixed_cnn"].push_back(conv_gene_to_json(g));
            fingerprint_ = fp.dump();
        }
    }

    std::optional<EvaluatedGenome> lookup(const std::string& key) {
        if (const auto it = memory_.find(key); it != memory_.end()) return it->second;
        if (dir_.empty()) return std::nullopt;
        const auto path = file_for(key);
        std::ifstream in(path);
        if (!in) return std::nullopt;
        try {
            json doc;
            in >> doc;
            if (doc.at("key").get<std::string>() != key ||
                doc.at("fingerprint").get<std::string>() != fingerprint_)
                return std::nullopt;
            EvaluatedGenome eval = eval_from_json(doc.at("result"));
            memory_.emplace(key, eval);  // disk hits still count as evaluated this run
            return eval;
        } catch (const std::exception&) {
            return std::nullopt;  // unreadable cache entries are recomputed
        }
    }

    void store(const EvaluatedGenome& eval) {
        memory_.emplace(eval.key, eval);
        if (dir_.empty()) return;
        json doc{{"schema_version", 1},
                 {"key", eval.key},
                 {"fingerprint", fingerprint_},
                 {"result", eval_to_json(eval)}};
        std::ofstream out(file_for(eval.key));
        if (out) out << doc.dump(2) << "\n";
    }

    const std::map<std::string, EvaluatedGenome>& evaluated() const { return memory_; }

  private:
    std::filesystem::path file_for(const std::string& key) const {
        char name[64];
        std::snprintf(name, sizeof(name), "%016llx-%016llx.json",
                      static_cast<unsigned long long>(hash_string64(fingerprint_)),
                      static_cast<unsigned long long>(hash_string64(key)));
        return std::filesystem::path(dir_) / name;
    }

    std::string dir_;
    std::string fingerprint_;
    std::map<std::string, EvaluatedGenome> memory_;
};

}  // namespace

ParetoArchive run_search(const SearchConfig& config) {
    const BackendModel backend = load_backend(config.backend);
    if (config.generations < 1 || config.population < 2)
        throw InvalidArgumentError("search needs at least 1 generation and 2 individuals");
    if (config.space.qubits_min < kMinAnsatzQubits ||
        config.space.qubits_max > kMaxAnsatzQubits ||
        config.space.qubits_min > config.space.qubits_max)
        throw InvalidArgumentError("qubit range outside the searchable space");
    if (config.space.qubits_max > backend.coupling.n_physical())
        throw InvalidArgumentError(
            "qubit range exceeds the backend (" + std::to_string(config.space.qubits_max) +
            " > " + std::to_string(backend.coupling.n_physical()) + " physical qubits)");
    if (config.space.depth_min < kMinAnsatzDepth || config.space.depth_max > kMaxAnsatzDepth ||
        config.space.depth_min > config.space.depth_max)
        throw InvalidArgumentError("depth range outside the searchable space");
    if (config.mode == SearchMode::Fixed) {
        // the fixed stack must fit; decode once to validate
        realize_conv_stack(config.fixed_cnn, {1, 8, 8}, /*truncate=*/false);
    }

    const Dataset dataset = make_dataset(config.dataset_classes,
                                         config.dataset_samples_per_class, config.dataset_seed);
    const double phi = config.phi_device ? *config.phi_device : measure_reference_throughput();

    EvaluationCache cache(config, backend);
    const auto evaluate = [&](const Genome& genome, int generation) {
        const std::string key = genome_key(genome);
        if (auto hit = cache.lookup(key)) return *hit;
        EvaluatedGenome eval = evaluate_genome(genome, config, backend, dataset, phi);
        eval.first_generation = generation;
        cache.store(eval);
        return eval;
    };

    Rng rng = Rng(config.seed).fork(0x6e736761ull);
    std::vector<EvaluatedGenome> current;
    current.reserve(static_cast<std::size_t>(config.population));
    for (int i = 0; i < config.population; ++i)
        current.push_back(evaluate(random_genome(config.mode, config.space, rng), 0));

    ParetoArchive archive;
    archive.generations.push_back(make_record(current));

    for (int generation = 1; generation < config.generations; ++generation) {
        std::vector<std::array<double, 4>> objs;
        objs.reserve(current.size());
        for (const auto& e : current) objs.push_back(e.objectives.as_array());
        const RankInfo info = rank_population(objs);

        std::vector<EvaluatedGenome> merged = current;
        for (int k = 0; k < config.population; ++k) {
            const int a = binary_tournament(info, rng);
            const int b = binary_tournament(info, rng);
            Genome child = crossover(current[static_cast<std::size_t>(a)].genome,
                                     current[static_cast<std::size_t>(b)].genome, rng);
            child = mutate(child, config.mutation_probability, config.space, rng);
            merged.push_back(evaluate(child, generation));
        }

        std::vector<std::array<double, 4>> merged_objs;
        merged_objs.reserve(merged.size());
        for (const auto& e : merged) merged_objs.push_back(e.objectives.as_array());
        const auto selected = environmental_selection(merged_objs, config.population);
        std::vector<EvaluatedGenome> next;
        next.reserve(selected.size());
        for (int idx : selected) next.push_back(merged[static_cast<std::size_t>(idx)]);
        current = std::move(next);
        archive.generations.push_back(make_record(current));
    }

    // global non-dominated set over every distinct evaluated genome
    std::vector<EvaluatedGenome> all;
    all.reserve(cache.evaluated().size());
    for (const auto& [_, eval] : cache.evaluated()) all.push_back(eval);
    std::vector<std::array<double, 4>> all_objs;
    all_objs.reserve(all.size());
    for (const auto& e : all) all_objs.push_back(e.objectives.as_array());
    const auto fronts = fast_nondominated_sort(all_objs);
    if (!fronts.empty()) {
        for (int idx : fronts.front())
            archive.final_front.push_back(all[static_cast<std::size_t>(idx)]);
        std::stable_sort(archive.final_front.begin(), archive.final_front.end(),
                         [](const EvaluatedGenome& a, const EvaluatedGenome& b) {
                             if (a.objectives.error != b.objectives.error)
                                 return a.objectives.error < b.objectives.error;
                             return a.key < b.key;
                         });
    }
    return archive;
}

json archive_to_json(const ParetoArchive& archive) {
    json generations = json::array();
    for (const GenerationRecord& record : archive.generations) {
        json population = json::array();
        for (const EvaluatedGenome& eval : record.population) population.push_back(eval_to_json(eval));
        generations.push_back({{"population", population},
                               {"ranks", record.ranks},
                               {"crowding", record.crowding}});
    }
    json front = json::array();
    for (const EvaluatedGenome& eval : archive.final_front) front.push_back(eval_to_json(eval));
    return {{"schema_version", 1}, {"generations", generations}, {"final_front", front}};
}

ParetoArchive archive_from_json(const json& doc) {
    ParetoArchive archive;
    for (const auto& g : doc.at("generations")) {
        GenerationRecord record;
        for (const auto& e : g.at("population")) record.population.push_back(eval_from_json(e));
        record.ranks = g.at("ranks").get<std::vector<int>>();
        // nlohmann prints non-finite doubles as null; crowding boundaries are +inf
        for (const auto& c : g.at("crowding"))
            record.crowding.push_back(
                c.is_null() ? std::numeric_limits<double>::infinity() : c.get<double>());
        archive.generations.push_back(std::move(record));
    }
    for (const auto& e : doc.at("final_front")) archive.final_front.push_back(eval_from_json(e));
    return archive;
}

SearchConfig search_config_from_json(const json& doc) {
    SearchConfig config;
    if (doc.contains("mode")) {
        const auto mode = search_mode_from_name(doc.at("mode").get<std::string>());
        if (!mode) throw InvalidArgumentError("mode must be 'fixed' or 'variable'");
        config.mode = *mode;
    }
    config.backend = doc.value("backend", config.backend);
    config.seed = doc.value("seed", config.seed);
    config.generations = doc.value("generations", config.generations);
    config.population = doc.value("population", config.population);
    config.mutation_probability = doc.value("mutation_probability", config.mutation_probability);
    if (doc.contains("dataset")) {
        const json& d = doc.at("dataset");
        config.dataset_classes = d.value("n_classes", config.dataset_classes);
        config.dataset_samples_per_class =
            d.value("samples_per_class", config.dataset_samples_per_class);
        config.dataset_seed = d.value("seed", config.dataset_seed);
    }
    if (doc.contains("training")) {
        const json& t = doc.at("training");
        config.training.epochs = t.value("epochs", config.training.epochs);
        config.training.lr = t.value("lr", config.training.lr);
        config.training.batch_size = t.value("batch_size", config.training.batch_size);
    }
    if (doc.contains("search_space")) {
        const json& s = doc.at("search_space");
        if (s.contains("qubits")) {
            config.space.qubits_min = s.at("qubits").at(0).get<int>();
            config.space.qubits_max = s.at("qubits").at(1).get<int>();
        }
        if (s.contains("depth")) {
            config.space.depth_min = s.at("depth").at(0).get<int>();
            config.space.depth_max = s.at("depth").at(1).get<int>();
        }
        if (s.contains("rotation_kinds")) {
            config.space.rotation_kinds.clear();
            for (const auto& name : s.at("rotation_kinds")) {
                const auto kind = gate_from_name(name.get<std::string>());
                if (!kind || !is_rotation(*kind))
                    throw InvalidArgumentError("bad rotation kind in search space");
                config.space.rotation_kinds.push_back(*kind);
            }
        }
        if (s.contains("topologies")) {
            config.space.topologies.clear();
            for (const auto& name : s.at("topologies")) {
                const auto topo = topology_from_name(name.get<std::string>());
                if (!topo) throw InvalidArgumentError("bad topology in search space");
                config.space.topologies.push_back(*topo);
            }
        }
        if (s.contains("conv_layers")) {
            config.space.conv_layers_min = s.at("conv_layers").at(0).get<int>();
            config.space.conv_layers_max = s.at("conv_layers").at(1).get<int>();
        }
        if (s.contains("out_channels"))
            config.space.out_channels = s.at("out_channels").get<std::vector<int>>();
        if (s.contains("kernels")) config.space.kernels = s.at("kernels").get<std::vector<int>>();
    }
    if (doc.contains("fixed_cnn")) {
        config.fixed_cnn.clear();
        for (const auto& g : doc.at("fixed_cnn")) config.fixed_cnn.push_back(conv_gene_from_json(g));
    }
    if (doc.contains("phi_device")) {
        if (doc.at("phi_device").is_string()) {
            if (doc.at("phi_device").get<std::string>() != "calibrate")
                throw InvalidArgumentError("phi_device must be a number or 'calibrate'");
            config.phi_device.reset();
        } else {
            config.phi_device = doc.at("phi_device").get<double>();
        }
    } else if (doc.contains("throughput_file")) {
        std::ifstream in(doc.at("throughput_file").get<std::string>());
        if (!in) throw IoError("cannot open throughput file");
        json t;
        in >> t;
        config.phi_device = t.at("phi_device").get<double>();
    }
    if (doc.contains("cache_dir")) config.cache_dir = doc.at("cache_dir").get<std::string>();
    return config;
}

json search_config_to_json(const SearchConfig& config) {
    json doc{{"schema_version", 1},
             {"mode", std::string(search_mode_name(config.mode))},
             {"backend", config.backend},
             {"seed", config.seed},
             {"generations", config.generations},
             {"population", config.population},
             {"mutation_probability", config.mutation_probability},
             {"dataset",
              {{"n_classes", config.dataset_classes},
               {"samples_per_class", config.dataset_samples_per_class},
               {"seed", config.dataset_seed}}},
             {"training",
              {{"epochs", config.training.epochs},
               {"lr", config.training.lr},
               {"batch_size", config.training.batch_size}}},
             {"search_space",
              {{"qubits", {config.space.qubits_min, config.space.qubits_max}},
               {"depth", {config.space.depth_min, config.space.depth_max}},
               {"conv_layers", {config.space.conv_layers_min, config.space.conv_layers_max}},
               {"out_channels", config.space.out_channels},
               {"kernels", config.space.kernels}}}};
    json fixed = json::array();
    for (const ConvGene& g : config.fixed_cnn) fixed.push_back(conv_gene_to_json(g));
    doc["fixed_cnn"] = fixed;
    if (config.phi_device)
        doc["phi_device"] = *config.phi_device;
    else
        doc["phi_device"] = "calibrate";
    if (config.cache_dir) doc["cache_dir"] = *config.cache_dir;
    return doc;
}

}  // namespace qcostnas
