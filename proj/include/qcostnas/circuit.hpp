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
 * @file circuit.hpp
 * Gate-level IR for parameterized quantum circuits, topology generators and
 * the ansatz family used by the architecture search.
 */

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcostnas/errors.hpp"
#include "qcostnas/rng.hpp"

namespace qcostnas {

enum class GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
    Swap,
    Sx,
    X,
    Ecr,
    Measure,
};

enum class GateClass { OneQubit, TwoQubit, Measurement };

GateClass classify(GateKind kind);
bool is_rotation(GateKind kind);
std::string_view gate_name(GateKind kind);
std::optional<GateKind> gate_from_name(std::string_view name);

/// Angle source of a rotation gate: a fixed literal, a trainable parameter
/// slot, or a data-input slot. The realized angle is
/// `scale * value(slot) + offset` (for Fixed, simply `offset`). Basis
/// decomposition rewrites keep the slot and fold constants into
/// scale/offset, so a parameter binding survives transpilation intact.
struct ParamBinding {
    enum class Source { Fixed, Trainable, Input };

    Source source = Source::Fixed;
    int slot = -1;
    double scale = 1.0;
    double offset = 0.0;

    static ParamBinding fixed(double angle) { return {Source::Fixed, -1, 0.0, angle}; }
    static ParamBinding trainable(int slot, double scale = 1.0, double offset = 0.0) {
        return {Source::Trainable, slot, scale, offset};
    }
    static ParamBinding input(int slot, double scale = 1.0, double offset = 0.0) {
        return {Source::Input, slot, scale, offset};
    }

    bool operator==(const ParamBinding&) const = default;
};

struct Gate {
    GateKind kind = GateKind::Measure;
    std::array<int, 2> qubits = {-1, -1};
    ParamBinding param;

    int arity() const { return classify(kind) == GateClass::TwoQubit ? 2 : 1; }
    bool operator==(const Gate&) const = default;
};

/**
 * Ordered gate list over a fixed qubit register.
 *
 * Invariants maintained by the builder methods: qubit indices are in range,
 * two-qubit gates touch two distinct qubits, and n_params equals the number
 * of gates bound to trainable slots (entanglers carry no parameters).
 */
class Circuit {
  public:
    explicit Circuit(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    int n_params() const { return n_params_; }
    int n_inputs() const { return n_inputs_; }
    const std::vector<Gate>& gates() const { return gates_; }
    bool empty() const { return gates_.empty(); }

    /// Appends a trainable rotation and returns the assigned slot.
    int add_trainable(GateKind kind, int qubit);
    /// Appends a data-bound rotation and returns the assigned input slot.
    int add_input(GateKind kind, int qubit);
    void add_fixed(GateKind kind, int qubit, double angle);
    void add_one_qubit(GateKind kind, int qubit);  // sx / x
    void add_two_qubit(GateKind kind, int a, int b);
    void add_measure(int qubit);

    /// Appends a pre-formed gate without renumbering slots. Slot indices must
    /// already lie below the declared counts (see with_counts).
    void add_raw(const Gate& gate);

    /// Empty circuit with externally managed slot counts; used by rewrite
    /// passes that preserve the source circuit's parameter space.
    static Circuit with_counts(int n_qubits, int n_params, int n_inputs);

    /// Full structural validation; throws InvalidArgumentError on the first
    /// violated invariant. Builder methods keep circuits valid, so this is
    /// mostly for deserialized circuits.
    void validate() const;

    bool operator==(const Circuit&) const = default;

  private:
    void check_qubit(int q) const;

    int n_qubits_ = 0;
    int n_params_ = 0;
    int n_inputs_ = 0;
    std::vector<Gate> gates_;
};

enum class Topology { Linear, Circular, Full, Star, Grid };

std::string_view topology_name(Topology t);
std::optional<Topology> topology_from_name(std::string_view name);

/// Deterministic edge list of an entanglement topology over n qubits.
/// Grid uses r = floor(sqrt(n)) rows and c = ceil(n/r) columns with a
/// possibly short last row.
std::vector<std::pair<int, int>> topology_edges(Topology topology, int n);

struct AnsatzSpec {
    int n_qubits = 2;
    int depth = 1;
    std::vector<GateKind> rotation_kinds = {GateKind::Ry};
    GateKind entangler = GateKind::Cnot;
    Topology topology = Topology::Linear;

    bool operator==(const AnsatzSpec&) const = default;
};

inline constexpr int kMinAnsatzQubits = 2;
inline constexpr int kMaxAnsatzQubits = 12;
inline constexpr int kMinAnsatzDepth = 1;
inline constexpr int kMaxAnsatzDepth = 15;

/// Layered hardware-efficient ansatz: per layer one rotation per qubit (the
/// layer's kind cycles through spec.rotation_kinds) followed by the
/// entangler on every topology edge; terminal measurement on every qubit.
Circuit build_ansatz(const AnsatzSpec& spec);

/// One data-bound RY per qubit; contributes to the one-qubit gate count but
/// not to n_params.
Circuit angle_embedding(int n_features);

/// Concatenation over the same register. Trainable and input slots of
/// `second` are shifted past those of `first`.
Circuit compose(const Circuit& first, const Circuit& second);

/// angle_embedding(spec.n_qubits) followed by build_ansatz(spec).
Circuit embedded_ansatz(const AnsatzSpec& spec);

struct GateCounts {
    std::int64_t one_qubit = 0;
    std::int64_t two_qubit = 0;
    std::int64_t measure = 0;
    /// Per-kind breakdown of the two-qubit total (SWAP counts as one gate at
    /// IR level; the transpiler expands it before costing).
    std::map<GateKind, std::int64_t> two_qubit_by_kind;

    bool operator==(const GateCounts&) const = default;
};

GateCounts gate_counts(const Circuit& circuit);

/// Random layered circuit for scheduler validation: per layer one random
/// rotation (fixed random angle) on each qubit plus one entangler on a random
/// qubit pair; terminal measurements.
Circuit random_logical_circuit(int n_qubits, int depth, Rng& rng);

/// Line-oriented text serialization; grammar in docs/circuit_format.md.
std::string to_text(const Circuit& circuit);
Circuit from_text(const std::string& text);

/// OPENQASM-2.0-like subset restricted to the gate kinds above, with `p<k>` /
/// `x<k>` accepted as angle arguments for trainable / input bindings.
Circuit from_qasm(const std::string& text);

}  // namespace qcostnas
