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

#include <set>

#include "qcostnas/circuit.hpp"

using namespace qcostnas;

TEST_SUITE_BEGIN("circuit");

TEST_CASE("topology_edges matches the named graph families") {
    CHECK(topology_edges(Topology::Linear, 4) ==
          std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
    // degenerate ring: (0,1) and (1,0) collapse to a single edge
    CHECK(topology_edges(Topology::Circular, 2) ==
          std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(topology_edges(Topology::Circular, 4).size() == 4);
    // brute-force enumeration of all pairs: C(4,2) = 6
    std::set<std::pair<int, int>> all_pairs;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) all_pairs.insert({i, j});
    const auto full = topology_edges(Topology::Full, 4);
    CHECK(full.size() == all_pairs.size());
    CHECK(std::set<std::pair<int, int>>(full.begin(), full.end()) == all_pairs);
    CHECK(topology_edges(Topology::Star, 5) ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK_THROWS_AS(topology_edges(Topology::Linear, 1), InvalidArgumentError);
}

TEST_CASE("topology_edges is deterministic and free of self/duplicate edges") {
    for (Topology t : {Topology::Linear, Topology::Circular, Topology::Full, Topology::Star,
                       Topology::Grid}) {
        for (int n = 2; n <= 12; ++n) {
            const auto edges = topology_edges(t, n);
            CHECK(edges == topology_edges(t, n));
            std::set<std::pair<int, int>> seen;
            for (auto [a, b] : edges) {
                CHECK(a != b);
                CHECK(a >= 0);
                CHECK(b < n);
                auto norm = a < b ? std::pair{a, b} : std::pair{b, a};
                CHECK(!seen.contains(norm));
                seen.insert(norm);
            }
        }
    }
}

TEST_CASE("every topology connects all qubits") {
    for (Topology t : {Topology::Linear, Topology::Circular, Topology::Full, Topology::Star,
                       Topology::Grid}) {
        for (int n = 2; n <= 12; ++n) {
            const auto edges = topology_edges(t, n);
            // union-find over the edge set
            std::vector<int> parent(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
            const auto find = [&](int x) {
                while (parent[static_cast<std::size_t>(x)] != x)
                    x = parent[static_cast<std::size_t>(x)];
                return x;
            };
            for (auto [a, b] : edges) parent[static_cast<std::size_t>(find(a))] = find(b);
            int roots = 0;
            for (int i = 0; i < n; ++i)
                if (find(i) == i) ++roots;
            CHECK_MESSAGE(roots == 1, "topology ", topology_name(t), " n=", n);
        }
    }
}

TEST_CASE("grid shape rule: floor(sqrt(n)) rows, short last row") {
    // n=5: 2 rows x 3 cols, cells 0..4
    CHECK(topology_edges(Topology::Grid, 5) ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {1, 4}, {3, 4}});
    // n=4: 2x2 lattice
    CHECK(topology_edges(Topology::Grid, 4) ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("build_ansatz produces the constructed gate counts") {
    SUBCASE("4 qubits, 1 layer, RY, CNOT, linear") {
        const Circuit c = build_ansatz({4, 1, {GateKind::Ry}, GateKind::Cnot, Topology::Linear});
        const GateCounts counts = gate_counts(c);
        CHECK(c.n_params() == 4);
        CHECK(counts.one_qubit == 4);
        CHECK(counts.two_qubit == 3);
        CHECK(counts.measure == 4);
        CHECK(counts.two_qubit_by_kind.at(GateKind::Cnot) == 3);
    }
    SUBCASE("2 qubits, circular CZ collapses to one entangler") {
        const Circuit c = build_ansatz({2, 1, {GateKind::Ry}, GateKind::Cz, Topology::Circular});
        const GateCounts counts = gate_counts(c);
        CHECK(c.n_params() == 2);
        CHECK(counts.one_qubit == 2);
        CHECK(counts.two_qubit == 1);
        CHECK(counts.measure == 2);
    }
    SUBCASE("3 qubits, 15 layers, full topology") {
        const Circuit c = build_ansatz({3, 15, {GateKind::Rx}, GateKind::Cnot, Topology::Full});
        CHECK(c.n_params() == 45);               // 15 layers x 3 qubits
        CHECK(gate_counts(c).two_qubit == 45);   // 15 x C(3,2)
    }
    SUBCASE("out-of-range points are rejected") {
        CHECK_THROWS_AS(build_ansatz({1, 1, {GateKind::Ry}, GateKind::Cnot, Topology::Linear}),
                        InvalidArgumentError);
        CHECK_THROWS_AS(build_ansatz({13, 1, {GateKind::Ry}, GateKind::Cnot, Topology::Linear}),
                        InvalidArgumentError);
        CHECK_THROWS_AS(build_ansatz({4, 0, {GateKind::Ry}, GateKind::Cnot, Topology::Linear}),
                        InvalidArgumentError);
        CHECK_THROWS_AS(build_ansatz({4, 16, {GateKind::Ry}, GateKind::Cnot, Topology::Linear}),
                        InvalidArgumentError);
        CHECK_THROWS_AS(build_ansatz({4, 1, {}, GateKind::Cnot, Topology::Linear}),
                        InvalidArgumentError);
    }
}

TEST_CASE("gate count identities over the whole search space") {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        AnsatzSpec spec;
        spec.n_qubits = static_cast<int>(rng.uniform_int(2, 12));
        spec.depth = static_cast<int>(rng.uniform_int(1, 15));
        spec.rotation_kinds = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
        spec.rotation_kinds.resize(static_cast<std::size_t>(rng.uniform_int(1, 3)));
        spec.entangler = rng.bernoulli(0.5) ? GateKind::Cnot : GateKind::Cz;
        spec.topology = static_cast<Topology>(rng.uniform_int(0, 4));
        const auto edges = topology_edges(spec.topology, spec.n_qubits);

        const Circuit bare = build_ansatz(spec);
        GateCounts counts = gate_counts(bare);
        CHECK(counts.one_qubit == spec.n_qubits * spec.depth);
        CHECK(counts.measure == spec.n_qubits);
        CHECK(counts.two_qubit == static_cast<std::int64_t>(edges.size()) * spec.depth);
        CHECK(bare.n_params() == spec.n_qubits * spec.depth);

        const Circuit embedded = embedded_ansatz(spec);
        counts = gate_counts(embedded);
        CHECK(counts.one_qubit == spec.n_qubits * spec.depth + spec.n_qubits);
        CHECK(embedded.n_params() == bare.n_params());
        CHECK(embedded.n_inputs() == spec.n_qubits);
    }
}

TEST_CASE("angle embedding binds one data rotation per qubit") {
    const Circuit emb = angle_embedding(4);
    CHECK(emb.n_inputs() == 4);
    CHECK(emb.n_params() == 0);
    CHECK(gate_counts(emb).one_qubit == 4);
    CHECK_THROWS_AS(angle_embedding(0), InvalidArgumentError);

    // embedding + ansatz(4,2) -> N_1q = 4 + 8 = 12 before transpilation
    const Circuit full =
        embedded_ansatz({4, 2, {GateKind::Ry}, GateKind::Cnot, Topology::Linear});
    CHECK(gate_counts(full).one_qubit == 12);

    // feature/qubit mismatch
    const Circuit ansatz = build_ansatz({3, 1, {GateKind::Ry}, GateKind::Cnot, Topology::Linear});
    CHECK_THROWS_AS(compose(angle_embedding(4), ansatz), InvalidArgumentError);
}

TEST_CASE("gate_counts classifies kinds and handles the empty circuit") {
    const Circuit empty(3);
    CHECK(gate_counts(empty) == GateCounts{});

    // Reference logical shape: 4 qubits, embedding + one RY layer -> (8,4,4)
    // with a circular entangler.
    const Circuit ref =
        embedded_ansatz({4, 1, {GateKind::Ry}, GateKind::Cnot, Topology::Circular});
    const GateCounts counts = gate_counts(ref);
    CHECK(counts.one_qubit == 8);
    CHECK(counts.two_qubit == 4);
    CHECK(counts.measure == 4);

    const Circuit star = build_ansatz({3, 2, {GateKind::Rx}, GateKind::Cnot, Topology::Star});
    const GateCounts star_counts = gate_counts(star);
    CHECK(star_counts.one_qubit == 6);
    CHECK(star_counts.two_qubit == 4);
    CHECK(star_counts.measure == 3);

    // SWAP counts as a single two-qubit gate at IR level
    Circuit with_swap(2);
    with_swap.add_two_qubit(GateKind::Swap, 0, 1);
    CHECK(gate_counts(with_swap).two_qubit == 1);
}

TEST_CASE("multiple rotation kinds cycle per layer, keeping n_params = q*d") {
    const Circuit c =
        build_ansatz({3, 4, {GateKind::Rx, GateKind::Rz}, GateKind::Cz, Topology::Linear});
    CHECK(c.n_params() == 12);
    int layer = 0;
    int rx_layers = 0, rz_layers = 0;
    for (const Gate& g : c.gates()) {
        if (!is_rotation(g.kind)) continue;
        if (g.qubits[0] == 0) {
            ++layer;
            if (g.kind == GateKind::Rx) ++rx_layers;
            if (g.kind == GateKind::Rz) ++rz_layers;
        }
    }
    CHECK(layer == 4);
    CHECK(rx_layers == 2);
    CHECK(rz_layers == 2);
}

TEST_CASE("builder invariants") {
    Circuit c(3);
    CHECK_THROWS_AS(c.add_two_qubit(GateKind::Cnot, 0, 0), InvalidArgumentError);
    CHECK_THROWS_AS(c.add_two_qubit(GateKind::Cnot, 0, 3), InvalidArgumentError);
    CHECK_THROWS_AS(c.add_trainable(GateKind::Cnot, 0), InvalidArgumentError);
    c.add_trainable(GateKind::Ry, 1);
    CHECK(c.n_params() == 1);
    c.validate();
}

TEST_CASE("text round-trip preserves circuits") {
    const Circuit original =
        embedded_ansatz({3, 2, {GateKind::Rx, GateKind::Ry}, GateKind::Cz, Topology::Star});
    const std::string text = to_text(original);
    const Circuit parsed = from_text(text);
    CHECK(parsed == original);
    CHECK(to_text(parsed) == text);
}

TEST_CASE("text parser rejects malformed inputs") {
    CHECK_THROWS_AS(from_text("ry 0 p0\n"), InvalidArgumentError);            // no header
    CHECK_THROWS_AS(from_text("circuit 2\nfoo 0\n"), InvalidArgumentError);   // unknown gate
    CHECK_THROWS_AS(from_text("circuit 2\nry 0\n"), InvalidArgumentError);    // missing angle
    CHECK_THROWS_AS(from_text("circuit 2\ncnot 0 2\n"), InvalidArgumentError);
    CHECK_THROWS_AS(from_text("circuit 2\nry 0 p0\nry 1 p0\n"), InvalidArgumentError);
}

TEST_CASE("qasm subset import") {
    const std::string qasm = R"(
OPENQASM 2.0;
include "qelib1.inc";
// a trainable two-qubit toy
qreg q[3];
creg c[3];
ry(p0) q[0];
rx(0.5) q[1];
rz(x0) q[2];
cx q[0],q[1];
cz q[1],q[2];
barrier q;
measure q[0] -> c[0];
measure q[1] -> c[1];
measure q[2] -> c[2];
)";
    const Circuit c = from_qasm(qasm);
    CHECK(c.n_qubits() == 3);
    CHECK(c.n_params() == 1);
    CHECK(c.n_inputs() == 1);
    const GateCounts counts = gate_counts(c);
    CHECK(counts.one_qubit == 3);
    CHECK(counts.two_qubit == 2);
    CHECK(counts.measure == 3);
    CHECK(counts.two_qubit_by_kind.at(GateKind::Cnot) == 1);

    CHECK_THROWS_AS(from_qasm("qreg q[2]; h q[0];"), InvalidArgumentError);
    CHECK_THROWS_AS(from_qasm("ry(0.3) q[0];"), InvalidArgumentError);  // no qreg
}

TEST_CASE("random logical circuits stay within the gate kind set") {
    Rng rng(11);
    const Circuit c = random_logical_circuit(4, 60, rng);
    const GateCounts counts = gate_counts(c);
    CHECK(counts.one_qubit == 4 * 60);
    CHECK(counts.two_qubit == 60);
    CHECK(counts.measure == 4);
    c.validate();
}

TEST_SUITE_END();
