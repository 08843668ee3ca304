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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qcostnas/reports.hpp"

using namespace qcostnas;
namespace oracle = qcostnas::test;

namespace {

ParetoArchive small_archive() {
    SearchConfig config;
    config.mode = SearchMode::Fixed;
    config.backend = "fake_linear7";
    config.seed = 21;
    config.generations = 2;
    config.population = 3;
    config.space.qubits_min = 2;
    config.space.qubits_max = 4;
    config.space.depth_min = 1;
    config.space.depth_max = 3;
    config.dataset_classes = 2;
    config.dataset_samples_per_class = 20;
    config.training.epochs = 1;
    config.phi_device = 2e10;
    return run_search(config);
}

int data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.find("generation,") != 0 &&
            line.find("circuit_id,") != 0 && line.find("n_qubits,") != 0)
            ++rows;
    return rows;
}

}  // namespace

TEST_SUITE_BEGIN("reports");

TEST_CASE("scheduler validation: bound holds on every row, zero_rz widens the gap") {
    const BackendModel backend = load_backend("fake_linear7");
    const ValidationReport report =
        cmd_validate_scheduler(backend, 20, 2, 5, 50, 200, /*seed=*/3);
    REQUIRE(report.rows.size() == 20);
    for (const ValidationRow& row : report.rows) {
        CHECK(row.t_gate >= row.makespan - 1e-18);
        CHECK(row.gap >= 0.0);
        CHECK(row.gap_zero_rz >= row.gap);
    }
    CHECK(report.mean_gap_zero_rz > report.mean_gap);
}

TEST_CASE("single-qubit-equivalent rows: serial circuits close the gap") {
    // a 2-qubit circuit with all gates on one qubit behaves serially
    const BackendModel backend = load_backend("fake_linear7");
    Circuit serial(2);
    serial.add_fixed(GateKind::Rx, 0, 0.3);
    serial.add_fixed(GateKind::Ry, 0, 0.9);
    serial.add_measure(0);
    const TranspiledCircuit t = transpile(serial, backend);
    const double t_gate = gate_execution_time(t.physical_counts, backend.calibration);
    const double makespan = asap_schedule(t.physical, backend.calibration);
    CHECK(t_gate == doctest::Approx(makespan).epsilon(1e-12));
}

TEST_CASE("validation csv is deterministic and matches row counts") {
    const BackendModel backend = load_backend("fake_linear7");
    const ValidationReport a = cmd_validate_scheduler(backend, 10, 2, 4, 50, 120, 5);
    const ValidationReport b = cmd_validate_scheduler(backend, 10, 2, 4, 50, 120, 5);
    CHECK(validation_csv(a) == validation_csv(b));
    CHECK(data_rows(validation_csv(a)) == 10);
}

TEST_CASE("ablation rows satisfy the decomposition identity and ordering") {
    const ParetoArchive archive = small_archive();
    const AblationReport report = cmd_ablate(archive);
    REQUIRE(!report.rows.empty());
    for (const AblationRow& row : report.rows) {
        CHECK(row.t_logical >= 0.0);
        CHECK(row.t_routing >= 0.0);
        CHECK(row.reliability_penalty >= 0.0);
        const double sum = row.t_logical + row.t_routing + row.reliability_penalty;
        CHECK(std::abs(sum - row.t_eff) <= 1e-12 * row.t_eff);
    }
    for (std::size_t i = 1; i < report.rows.size(); ++i)
        CHECK(report.rows[i - 1].t_eff >= report.rows[i].t_eff);

    const AblationReport empty = cmd_ablate(ParetoArchive{});
    CHECK(empty.rows.empty());
}

TEST_CASE("linear-topology architectures on the line backend show zero routing") {
    SearchConfig config;
    config.mode = SearchMode::Fixed;
    config.backend = "fake_linear7";
    config.dataset_classes = 2;
    config.dataset_samples_per_class = 20;
    config.training.epochs = 1;
    const BackendModel backend = load_backend(config.backend);
    const Dataset dataset = make_dataset(2, 20, 1);

    Genome linear;
    linear.n_qubits = 4;
    linear.depth = 2;
    linear.topology = Topology::Linear;
    const EvaluatedGenome l = evaluate_genome(linear, config, backend, dataset, 2e10);
    REQUIRE(l.quantum_cost.has_value());
    CHECK(l.quantum_cost->t_routing == 0.0);

    Genome full = linear;
    full.topology = Topology::Full;
    const EvaluatedGenome f = evaluate_genome(full, config, backend, dataset, 2e10);
    REQUIRE(f.quantum_cost.has_value());
    CHECK(f.quantum_cost->t_routing > 0.0);
}

TEST_CASE("export writes reproducible files with the right row counts") {
    namespace fs = std::filesystem;
    const ParetoArchive archive = small_archive();
    const fs::path dir = fs::temp_directory_path() / "qcostnas_export_test";
    fs::remove_all(dir);
    ExportOptions options;
    options.svg = true;
    const ExportPaths paths = cmd_export_pareto(archive, dir.string(), options);
    CHECK(paths.files.size() == 3 + 6);

    std::ifstream gen_in(dir / "generations.csv", std::ios::binary);
    std::stringstream gen_buf;
    gen_buf << gen_in.rdbuf();
    std::size_t expected = 0;
    for (const auto& record : archive.generations) expected += record.population.size();
    CHECK(data_rows(gen_buf.str()) == static_cast<int>(expected));

    // re-export is byte identical
    const fs::path dir2 = fs::temp_directory_path() / "qcostnas_export_test2";
    fs::remove_all(dir2);
    cmd_export_pareto(archive, dir2.string(), options);
    for (const char* name : {"generations.csv", "final_front.csv", "archive.json"}) {
        std::ifstream a(dir / name, std::ios::binary), b(dir2 / name, std::ios::binary);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("final-front export rows match the archive's front set exactly") {
    const ParetoArchive archive = small_archive();
    const std::string csv = final_front_csv(archive);
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("generation,", 0) == 0) continue;
        ++rows;
        // rank column is always 1 and the final_front flag is set
        CHECK(line.back() == '1');
    }
    CHECK(rows == static_cast<int>(archive.final_front.size()));

    // flagged rows of the history export only ever name front members
    const std::string history = generations_csv(archive);
    std::istringstream hin(history);
    int flagged = 0;
    while (std::getline(hin, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("generation,", 0) == 0) continue;
        if (line.back() == '1') ++flagged;
    }
    CHECK(flagged >= 1);  // the front intersects the archived populations
}

TEST_CASE("svg export is structurally sound") {
    const ParetoArchive archive = small_archive();
    const std::string svg = pareto_svg(archive, 0, 1);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t circles = 0, pos = 0;
    while ((pos = svg.find("<circle", pos)) != std::string::npos) {
        ++circles;
        pos += 7;
    }
    std::size_t expected = 0;
    for (const auto& record : archive.generations) expected += record.population.size();
    CHECK(circles == expected);
    CHECK(svg.find("fill=\"red\"") != std::string::npos);
    CHECK_THROWS_AS(pareto_svg(archive, 1, 1), InvalidArgumentError);
}

TEST_CASE("hypervolume: boxes, dominance, and permutation symmetry") {
    using P = std::array<double, 4>;
    const P ref = {1, 1, 1, 1};
    SUBCASE("single point box volume") {
        const std::vector<P> one = {{0.5, 0.5, 0.5, 0.5}};
        CHECK(hypervolume(one, ref) == doctest::Approx(0.0625).epsilon(1e-12));
    }
    SUBCASE("dominated points do not change the volume") {
        const std::vector<P> base = {{0.2, 0.3, 0.4, 0.5}};
        const std::vector<P> extra = {{0.2, 0.3, 0.4, 0.5}, {0.6, 0.7, 0.8, 0.9}};
        CHECK(hypervolume(base, ref) == doctest::Approx(hypervolume(extra, ref)).epsilon(1e-12));
    }
    SUBCASE("axis permutation with permuted reference preserves the value") {
        const std::vector<P> pts = {{0.1, 0.4, 0.2, 0.8}, {0.5, 0.2, 0.6, 0.3}};
        const P ref2 = {1.0, 2.0, 1.5, 1.2};
        std::vector<P> permuted;
        for (const P& p : pts) permuted.push_back({p[2], p[0], p[3], p[1]});
        const P ref_permuted = {ref2[2], ref2[0], ref2[3], ref2[1]};
        CHECK(hypervolume(pts, ref2) ==
              doctest::Approx(hypervolume(permuted, ref_permuted)).epsilon(1e-12));
    }
    SUBCASE("agrees with the inclusion-exclusion oracle on random sets") {
        Rng rng(71);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<P> pts;
            const int n = static_cast<int>(rng.uniform_int(1, 10));
            for (int i = 0; i < n; ++i)
                pts.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
            const double expected = oracle::hypervolume_inclusion_exclusion(pts, ref);
            CHECK(hypervolume(pts, ref) == doctest::Approx(expected).epsilon(1e-10));
        }
    }
    SUBCASE("points outside the reference box are rejected") {
        const std::vector<P> bad = {{1.5, 0.5, 0.5, 0.5}};
        CHECK_THROWS_AS(hypervolume(bad, ref), InvalidArgumentError);
    }
}

TEST_CASE("hypervolume of the final front dominates generation zero") {
    const ParetoArchive archive = small_archive();
    const auto gen0 = front_objectives(archive.generations.front());
    const auto final_front = front_objectives(archive.final_front);
    const auto ref = hypervolume_reference(gen0, final_front);
    CHECK(hypervolume(final_front, ref) >= hypervolume(gen0, ref) - 1e-15);
}

TEST_SUITE_END();
