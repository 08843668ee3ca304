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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "qcostnas/nas.hpp"

using namespace qcostnas;
namespace oracle = qcostnas::test;

namespace {

std::array<double, 4> pt(double a, double b, double c = 0.0, double d = 0.0) {
    return {a, b, c, d};
}

SearchConfig smoke_config(SearchMode mode) {
    SearchConfig config;
    config.mode = mode;
    config.backend = "fake_linear7";
    config.seed = 11;
    config.generations = 1;
    config.population = 2;
    config.space.qubits_min = 2;
    config.space.qubits_max = 3;
    config.space.depth_min = 1;
    config.space.depth_max = 2;
    config.dataset_classes = 2;
    config.dataset_samples_per_class = 20;
    config.training.epochs = 1;
    config.phi_device = 2e10;
    return config;
}

}  // namespace

TEST_SUITE_BEGIN("nas");

TEST_CASE("random genomes respect mode and bounds; all topologies appear") {
    SearchSpace space;
    Rng rng(3);
    std::set<Topology> seen_topologies;
    std::set<GateKind> seen_entanglers;
    for (int i = 0; i < 1000; ++i) {
        const Genome g = random_genome(SearchMode::Fixed, space, rng);
        CHECK(g.conv.empty());
        CHECK(g.n_qubits >= 2);
        CHECK(g.n_qubits <= 12);
        CHECK(g.depth >= 1);
        CHECK(g.depth <= 15);
        CHECK(!g.rotation_kinds.empty());
        seen_topologies.insert(g.topology);
        seen_entanglers.insert(g.entangler);
    }
    CHECK(seen_topologies.size() == 5);
    CHECK(seen_entanglers.size() == 2);

    const Genome v = random_genome(SearchMode::Variable, space, rng);
    CHECK(!v.conv.empty());
    CHECK(v.conv.size() <= 3);
}

TEST_CASE("seeded genome streams replay") {
    SearchSpace space;
    Rng a(77), b(77);
    for (int i = 0; i < 20; ++i)
        CHECK(random_genome(SearchMode::Variable, space, a) ==
              random_genome(SearchMode::Variable, space, b));
}

TEST_CASE("crossover: identical parents reproduce themselves") {
    SearchSpace space;
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const Genome parent = random_genome(SearchMode::Variable, space, rng);
        CHECK(crossover(parent, parent, rng) == parent);
    }
}

TEST_CASE("crossover draws every gene from one of the parents") {
    SearchSpace space;
    Rng rng(7);
    bool saw_a_allele = false, saw_b_allele = false;
    for (int i = 0; i < 1000; ++i) {
        const Genome a = random_genome(SearchMode::Fixed, space, rng);
        const Genome b = random_genome(SearchMode::Fixed, space, rng);
        const Genome child = crossover(a, b, rng);
        CHECK((child.n_qubits == a.n_qubits || child.n_qubits == b.n_qubits));
        CHECK((child.depth == a.depth || child.depth == b.depth));
        CHECK((child.topology == a.topology || child.topology == b.topology));
        CHECK((child.entangler == a.entangler || child.entangler == b.entangler));
        CHECK((child.rotation_kinds == a.rotation_kinds || child.rotation_kinds == b.rotation_kinds));
        if (a.n_qubits != b.n_qubits) {
            if (child.n_qubits == a.n_qubits) saw_a_allele = true;
            if (child.n_qubits == b.n_qubits) saw_b_allele = true;
        }
    }
    CHECK(saw_a_allele);
    CHECK(saw_b_allele);

    Genome fixed;
    Genome variable = fixed;
    variable.conv.push_back(ConvGene{});
    Rng rng2(1);
    CHECK_THROWS_AS(crossover(fixed, variable, rng2), InvalidArgumentError);
}

TEST_CASE("mutation: p=0 is the identity, p=1 perturbs every gene") {
    SearchSpace space;
    Rng rng(9);
    const Genome g = random_genome(SearchMode::Variable, space, rng);
    CHECK(mutate(g, 0.0, space, rng) == g);
    // ordinal genes always move under a forced perturbation
    const Genome heavy = mutate(g, 1.0, space, rng);
    CHECK(heavy.n_qubits != g.n_qubits);
    CHECK(heavy.depth != g.depth);
}

TEST_CASE("empirical per-gene mutation rate approaches p_m") {
    SearchSpace space;
    Rng rng(13);
    Genome g;
    g.n_qubits = 7;  // interior of [2,12]: a step always changes the value
    g.depth = 8;
    int qubit_changes = 0, depth_changes = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const Genome m = mutate(g, 0.4, space, rng);
        if (m.n_qubits != g.n_qubits) ++qubit_changes;
        if (m.depth != g.depth) ++depth_changes;
    }
    CHECK(std::abs(qubit_changes / double(trials) - 0.4) < 0.02);
    CHECK(std::abs(depth_changes / double(trials) - 0.4) < 0.02);
}

TEST_CASE("mutation reflects at the bounds and respects them") {
    SearchSpace space;
    Rng rng(15);
    Genome g;
    g.n_qubits = 2;
    g.depth = 15;
    for (int i = 0; i < 200; ++i) {
        const Genome m = mutate(g, 1.0, space, rng);
        CHECK(m.n_qubits == 3);  // reflection at the lower bound
        CHECK(m.depth == 14);    // reflection at the upper bound
    }
}

TEST_CASE("fast_nondominated_sort matches the documented example") {
    const std::vector<std::array<double, 4>> points = {pt(1, 1), pt(1, 2), pt(2, 1), pt(2, 2)};
    const auto fronts = fast_nondominated_sort(points);
    REQUIRE(fronts.size() == 3);
    CHECK(fronts[0] == std::vector<int>{0});
    CHECK(fronts[1] == std::vector<int>{1, 2});
    CHECK(fronts[2] == std::vector<int>{3});
}

TEST_CASE("identical points share one front; singletons are trivial") {
    const std::vector<std::array<double, 4>> same = {pt(3, 3), pt(3, 3), pt(3, 3)};
    CHECK(fast_nondominated_sort(same).size() == 1);
    const std::vector<std::array<double, 4>> one = {pt(1, 2)};
    const auto fronts = fast_nondominated_sort(one);
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0] == std::vector<int>{0});
}

TEST_CASE("sorting agrees with the brute-force oracle on random 4-D sets") {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 50));
        std::vector<std::array<double, 4>> points;
        points.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            // duplicates on purpose: coarse grid
            points.push_back(pt(std::floor(rng.uniform(0, 5)), std::floor(rng.uniform(0, 5)),
                                std::floor(rng.uniform(0, 5)), std::floor(rng.uniform(0, 5))));
        }
        const auto fast = fast_nondominated_sort(points);
        const auto brute = oracle::brute_force_fronts(points);
        REQUIRE(fast.size() == brute.size());
        for (std::size_t f = 0; f < fast.size(); ++f) {
            CHECK(std::set<int>(fast[f].begin(), fast[f].end()) ==
                  std::set<int>(brute[f].begin(), brute[f].end()));
        }
    }
}

TEST_CASE("crowding distance: boundary rule and equally spaced interior") {
    SUBCASE("two points are both boundaries") {
        const std::vector<std::array<double, 4>> front = {pt(0, 1), pt(1, 0)};
        const auto d = crowding_distance(front);
        CHECK(std::isinf(d[0]));
        CHECK(std::isinf(d[1]));
    }
    SUBCASE("three collinear equally spaced points: middle gets 2") {
        const std::vector<std::array<double, 4>> front = {pt(0, 2), pt(1, 1), pt(2, 0)};
        const auto d = crowding_distance(front);
        CHECK(std::isinf(d[0]));
        CHECK(d[1] == doctest::Approx(2.0));
        CHECK(std::isinf(d[2]));
    }
    SUBCASE("interior duplicates stay finite and symmetric placement keeps them equal") {
        const std::vector<std::array<double, 4>> front = {pt(0, 0), pt(1, 1), pt(1, 1),
                                                          pt(2, 2)};
        const auto d = crowding_distance(front);
        CHECK(std::isfinite(d[1]));
        CHECK(std::isfinite(d[2]));
        CHECK(d[1] == doctest::Approx(d[2]));
    }
    SUBCASE("zero-range objectives contribute nothing") {
        const std::vector<std::array<double, 4>> front = {pt(0, 5), pt(1, 5), pt(2, 5)};
        const auto d = crowding_distance(front);
        CHECK(d[1] == doctest::Approx(1.0));  // only the first objective spreads
    }
}

TEST_CASE("environmental selection truncates the last front by crowding") {
    // rank-1 set bigger than the target: survivors are the most spread ones
    const std::vector<std::array<double, 4>> points = {
        pt(0.0, 1.0), pt(0.1, 0.8), pt(0.2, 0.6), pt(0.5, 0.5), pt(0.8, 0.2), pt(1.0, 0.0),
    };
    const auto selected = environmental_selection(points, 4);
    REQUIRE(selected.size() == 4);
    // oracle reimplementation of the truncation rule
    const auto distances = crowding_distance(points);
    std::vector<int> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return distances[static_cast<std::size_t>(a)] >
                                                distances[static_cast<std::size_t>(b)]; });
    const std::set<int> expected(order.begin(), order.begin() + 4);
    CHECK(std::set<int>(selected.begin(), selected.end()) == expected);
}

TEST_CASE("elitism: offspring equal to parents keep the non-dominated set") {
    // two copies of the parent population merged; the non-dominated parents
    // (0,3) and (1,1) must be among the survivors
    const std::vector<std::array<double, 4>> parents = {pt(0, 3), pt(1, 1), pt(2, 2), pt(3, 3)};
    std::vector<std::array<double, 4>> merged = parents;
    merged.insert(merged.end(), parents.begin(), parents.end());
    const auto selected = environmental_selection(merged, 4);
    std::set<std::size_t> chosen;
    for (int idx : selected) chosen.insert(static_cast<std::size_t>(idx) % parents.size());
    CHECK(chosen.contains(0));
    CHECK(chosen.contains(1));
    CHECK(!chosen.contains(3));  // a dominated parent cannot displace rank 1
}

TEST_CASE("genome json round trip is canonical") {
    SearchSpace space;
    Rng rng(19);
    for (int i = 0; i < 20; ++i) {
        const Genome g = random_genome(SearchMode::Variable, space, rng);
        const Genome back = genome_from_json(genome_to_json(g));
        CHECK(back == g);
        CHECK(genome_key(back) == genome_key(g));
    }
}

TEST_CASE("decode truncates conv genes that do not fit 8x8 under valid padding") {
    SearchConfig config = smoke_config(SearchMode::Variable);
    Genome g;
    g.n_qubits = 3;
    g.depth = 1;
    g.conv = {ConvGene{8, 7, Activation::Relu, Pooling::None, false},
              ConvGene{16, 7, Activation::Relu, Pooling::None, false},
              ConvGene{32, 3, Activation::Relu, Pooling::None, false}};
    const HybridSpec spec = decode_genome(g, config);
    // 8x8 -k7-> 2x2: the second k=7 and third k=3 layers cannot fit
    REQUIRE(spec.conv_stack.size() == 1);
    CHECK(spec.conv_stack[0].kernel == 7);
    // the decoded spec must build and run
    CHECK_NOTHROW(HybridModel::build(spec, 1));
}

TEST_CASE("evaluate_genome produces consistent objectives") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    const BackendModel backend = load_backend(config.backend);
    const Dataset dataset = make_dataset(config.dataset_classes,
                                         config.dataset_samples_per_class, config.dataset_seed);
    Genome g;
    g.n_qubits = 3;
    g.depth = 2;
    const EvaluatedGenome eval = evaluate_genome(g, config, backend, dataset, 2e10);
    CHECK(eval.objectives.error == doctest::Approx(1.0 - eval.accuracy));
    CHECK(eval.quantum_params == 6);
    REQUIRE(eval.quantum_cost.has_value());
    CHECK(eval.objectives.t_quantum_total ==
          doctest::Approx(eval.quantum_cost->t_quantum_total));
    CHECK(eval.objectives.t_classical_total ==
          doctest::Approx(eval.classical_cost.t_classical_total));
    CHECK(eval.n_steps > 0);
    CHECK(!eval.reliability_saturated);
    // n_eval consistency between the cost model and the circuit
    CHECK(eval.quantum_cost->n_eval == 2 * eval.quantum_params);
}

TEST_CASE("saturated reliability maps to the sentinel objective") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    nlohmann::json doc = nlohmann::json::parse(preset_json("fake_linear7"));
    doc["calibration"]["eps_2q"] = 0.8;  // absurdly noisy device
    doc["calibration"]["t2"] = 100.0;
    const BackendModel noisy = backend_from_json(doc);
    const Dataset dataset = make_dataset(2, 20, 1);
    config.dataset_classes = 2;
    config.dataset_samples_per_class = 20;
    Genome g;
    g.n_qubits = 5;
    g.depth = 2;
    g.topology = Topology::Full;
    const EvaluatedGenome eval = evaluate_genome(g, config, noisy, dataset, 2e10);
    CHECK(eval.reliability_saturated);
    CHECK(!eval.quantum_cost.has_value());
    CHECK(eval.objectives.t_quantum_total == kSaturatedQuantumCost);
    CHECK(std::isfinite(eval.objectives.t_quantum_total));
}

TEST_CASE("smoke run: one generation, population two") {
    const ParetoArchive archive = run_search(smoke_config(SearchMode::Fixed));
    REQUIRE(archive.generations.size() == 1);
    CHECK(archive.generations[0].population.size() == 2);
    CHECK(!archive.final_front.empty());
    for (const auto& eval : archive.final_front)
        for (double v : eval.objectives.as_array()) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
}

TEST_CASE("search rejects configs wider than the device before training") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    config.space.qubits_max = 9;  // fake_linear7 has 7 wires
    CHECK_THROWS_AS(run_search(config), InvalidArgumentError);
    config.backend = "definitely_missing.json";
    CHECK_THROWS_AS(run_search(config), IoError);
}

TEST_CASE("identical config and seed reproduce the archive; cache dir is reused") {
    namespace fs = std::filesystem;
    const fs::path cache_dir = fs::temp_directory_path() / "qcostnas_cache_test";
    fs::remove_all(cache_dir);
    SearchConfig config = smoke_config(SearchMode::Variable);
    config.generations = 2;
    config.population = 3;
    config.cache_dir = cache_dir.string();

    const ParetoArchive a = run_search(config);
    CHECK(fs::exists(cache_dir));
    CHECK(!fs::is_empty(cache_dir));
    const ParetoArchive b = run_search(config);  // second run hits the disk cache
    CHECK(archive_to_json(a).dump() == archive_to_json(b).dump());
    fs::remove_all(cache_dir);
}

TEST_CASE("QCOSTNAS_CACHE_DIR drives the cache when the config is silent") {
    namespace fs = std::filesystem;
    const fs::path cache_dir = fs::temp_directory_path() / "qcostnas_env_cache_test";
    fs::remove_all(cache_dir);
    setenv("QCOSTNAS_CACHE_DIR", cache_dir.c_str(), 1);
    SearchConfig config = smoke_config(SearchMode::Fixed);
    config.cache_dir.reset();
    const ParetoArchive a = run_search(config);
    unsetenv("QCOSTNAS_CACHE_DIR");
    CHECK(fs::exists(cache_dir));
    CHECK(!fs::is_empty(cache_dir));
    // without the env var the same search recomputes but must agree
    const ParetoArchive b = run_search(config);
    CHECK(archive_to_json(a).dump() == archive_to_json(b).dump());
    fs::remove_all(cache_dir);
}

TEST_CASE("archive json round trip") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    config.generations = 2;
    config.population = 3;
    const ParetoArchive archive = run_search(config);
    const ParetoArchive back = archive_from_json(archive_to_json(archive));
    CHECK(archive_to_json(back).dump() == archive_to_json(archive).dump());
    REQUIRE(back.generations.size() == archive.generations.size());
    CHECK(back.final_front.size() == archive.final_front.size());
}

TEST_CASE("population size is restored every generation") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    config.generations = 3;
    config.population = 4;
    config.space.qubits_max = 4;
    const ParetoArchive archive = run_search(config);
    REQUIRE(archive.generations.size() == 3);
    for (const auto& record : archive.generations)
        CHECK(record.population.size() == 4);
}

TEST_CASE("dominance soundness: no final-front member is dominated by history") {
    SearchConfig config = smoke_config(SearchMode::Fixed);
    config.generations = 3;
    config.population = 4;
    const ParetoArchive archive = run_search(config);
    std::vector<EvaluatedGenome> all;
    std::set<std::string> seen;
    for (const auto& record : archive.generations)
        for (const auto& eval : record.population)
            if (seen.insert(eval.key).second) all.push_back(eval);
    for (const auto& member : archive.final_front)
        for (const auto& other : all)
            CHECK(!dominates(other.objectives.as_array(), member.objectives.as_array()));
}

TEST_CASE("config accepts a persisted throughput file") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "qcostnas_throughput_test.json";
    {
        std::ofstream out(path);
        out << R"({"schema_version": 1, "reference": "fixed-cnn", "phi_device": 3.5e10})";
    }
    nlohmann::json doc{{"mode", "fixed"}, {"throughput_file", path.string()}};
    const SearchConfig config = search_config_from_json(doc);
    REQUIRE(config.phi_device.has_value());
    CHECK(*config.phi_device == doctest::Approx(3.5e10));
    fs::remove(path);

    // "calibrate" requests a startup measurement instead
    const SearchConfig measured =
        search_config_from_json(nlohmann::json{{"phi_device", "calibrate"}});
    CHECK(!measured.phi_device.has_value());
}

TEST_CASE("search config json round trip") {
    SearchConfig config = smoke_config(SearchMode::Variable);
    config.cache_dir = "/tmp/somewhere";
    const SearchConfig back = search_config_from_json(search_config_to_json(config));
    CHECK(back.mode == config.mode);
    CHECK(back.backend == config.backend);
    CHECK(back.seed == config.seed);
    CHECK(back.generations == config.generations);
    CHECK(back.population == config.population);
    CHECK(back.space.qubits_min == config.space.qubits_min);
    CHECK(back.space.qubits_max == config.space.qubits_max);
    CHECK(back.phi_device == config.phi_device);
    CHECK(back.cache_dir == config.cache_dir);
}

TEST_SUITE_END();
