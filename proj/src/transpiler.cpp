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

#include "qcostnas/transpiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qcostnas {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kHalfPi = 0.5 * kPi;

/// Emits `angle`-carrying rz with the binding shifted by a constant.
ParamBinding shifted(const ParamBinding& b, double extra_offset) {
    ParamBinding out = b;
    out.offset += extra_offset;
    return out;
}

class Rewriter {
  public:
    Rewriter(const BackendModel& backend, Circuit& out)
        : basis_(backend.basis), out_(out) {}

    void require_one_qubit(GateKind kind) const {
        if (!basis_.has_one_qubit(kind))
            throw UnsupportedGateError("native basis lacks '" + std::string(gate_name(kind)) +
                                       "'; no rewrite rule applies");
    }

    void rz(int q, const ParamBinding& b) {
        require_one_qubit(GateKind::Rz);
        out_.add_raw({GateKind::Rz, {q, -1}, b});
    }
    void rz_fixed(int q, double angle) { rz(q, ParamBinding::fixed(angle)); }
    void sx(int q) {
        require_one_qubit(GateKind::Sx);
        out_.add_raw({GateKind::Sx, {q, -1}, {}});
    }
    void x(int q) {
        if (basis_.has_one_qubit(GateKind::X)) {
            out_.add_raw({GateKind::X, {q, -1}, {}});
        } else {
            sx(q);
            sx(q);
        }
    }
    void native_2q(int a, int b) { out_.add_raw({basis_.two_qubit, {a, b}, {}}); }

    /// rx(theta) = rz(pi/2) . sx . rz(theta+pi) . sx . rz(pi/2) applied in
    /// circuit order; ry drops the outer phase gates down to rz(pi) tail.
    void rotation(GateKind kind, int q, const ParamBinding& b) {
        switch (kind) {
            case GateKind::Rz:
                rz(q, b);
                return;
            case GateKind::Rx:
                rz_fixed(q, kHalfPi);
                sx(q);
                rz(q, shifted(b, kPi));
                sx(q);
                rz_fixed(q, kHalfPi);
                return;
            case GateKind::Ry:
                sx(q);
                rz(q, shifted(b, kPi));
                sx(q);
                rz_fixed(q, kPi);
                return;
            default:
                throw UnsupportedGateError("not a rotation");
        }
    }

    /// h = rz(pi/2) . sx . rz(pi/2) up to global phase.
    void hadamard(int q) {
        rz_fixed(q, kHalfPi);
        sx(q);
        rz_fixed(q, kHalfPi);
    }

    void cnot(int c, int t) {
        switch (basis_.two_qubit) {
            case GateKind::Cnot:
                native_2q(c, t);
                return;
            case GateKind::Cz:
                hadamard(t);
                native_2q(c, t);
                hadamard(t);
                return;
            case GateKind::Ecr:
                // cnot = rz(pi/2)_c . sx_t . ecr(c,t) . x_c in matrix order
                x(c);
                native_2q(c, t);
                sx(t);
                rz_fixed(c, kHalfPi);
                return;
            default:
                throw UnsupportedGateError("unsupported native two-qubit gate");
        }
    }

    void cz(int a, int b) {
        if (basis_.two_qubit == GateKind::Cz) {
            native_2q(a, b);
            return;
        }
        hadamard(b);
        cnot(a, b);
        hadamard(b);
    }

    void ecr(int c, int t) {
        if (basis_.two_qubit == GateKind::Ecr) {
            native_2q(c, t);
            return;
        }
        // ecr = rx(-pi/2)_t . rz(-pi/2)_c . cnot(c,t) . x_c in matrix order
        x(c);
        cnot(c, t);
        rz_fixed(c, -kHalfPi);
        rotation(GateKind::Rx, t, ParamBinding::fixed(-kHalfPi));
    }

    void swap(int a, int b) {
        cnot(a, b);
        cnot(b, a);
        cnot(a, b);
    }

  private:
    const NativeBasis& basis_;
    Circuit& out_;
};

}  // namespace

Circuit decompose_to_basis(const Circuit& circuit, const BackendModel& backend) {
    Circuit out =
        Circuit::with_counts(circuit.n_qubits(), circuit.n_params(), circuit.n_inputs());
    Rewriter rw(backend, out);
    for (const Gate& g : circuit.gates()) {
        switch (g.kind) {
            case GateKind::Rx:
            case GateKind::Ry:
            case GateKind::Rz:
                if (backend.basis.has_one_qubit(g.kind)) {
                    out.add_raw(g);
                } else {
                    rw.rotation(g.kind, g.qubits[0], g.param);
                }
                break;
            case GateKind::Sx:
                rw.sx(g.qubits[0]);
                break;
            case GateKind::X:
                rw.x(g.qubits[0]);
                break;
            case GateKind::Cnot:
                rw.cnot(g.qubits[0], g.qubits[1]);
                break;
            case GateKind::Cz:
                rw.cz(g.qubits[0], g.qubits[1]);
                break;
            case GateKind::Ecr:
                rw.ecr(g.qubits[0], g.qubits[1]);
                break;
            case GateKind::Swap:
                rw.swap(g.qubits[0], g.qubits[1]);
                break;
            case GateKind::Measure:
                out.add_raw(g);
                break;
        }
    }
    return out;
}

RouteResult route(const Circuit& circuit, const CouplingMap& coupling,
                  std::vector<int> initial_layout) {
    if (circuit.n_qubits() > coupling.n_physical())
        throw InvalidArgumentError("circuit needs " + std::to_string(circuit.n_qubits()) +
                                   " qubits but the device has " +
                                   std::to_string(coupling.n_physical()));
    if (initial_layout.empty()) {
        initial_layout.resize(static_cast<std::size_t>(circuit.n_qubits()));
        std::iota(initial_layout.begin(), initial_layout.end(), 0);
    }
    if (static_cast<int>(initial_layout.size()) != circuit.n_qubits())
        throw InvalidArgumentError("layout size does not match the circuit");

    // logical -> physical and its inverse over the full device
    std::vector<int> layout = initial_layout;
    std::vector<int> wire_to_logical(static_cast<std::size_t>(coupling.n_physical()), -1);
    for (std::size_t l = 0; l < layout.size(); ++l) {
        const int w = layout[l];
        if (w < 0 || w >= coupling.n_physical() || wire_to_logical[static_cast<std::size_t>(w)] != -1)
            throw InvalidArgumentError("initial layout is not injective into the device");
        wire_to_logical[static_cast<std::size_t>(w)] = static_cast<int>(l);
    }

    RouteResult result{Circuit::with_counts(coupling.n_physical(), circuit.n_params(),
                                            circuit.n_inputs()),
                       {},
                       0};
    auto swap_wires = [&](int wa, int wb) {
        result.routed.add_raw({GateKind::Swap, {wa, wb}, {}});
        ++result.swap_count;
        const int la = wire_to_logical[static_cast<std::size_t>(wa)];
        const int lb = wire_to_logical[static_cast<std::size_t>(wb)];
        wire_to_logical[static_cast<std::size_t>(wa)] = lb;
        wire_to_logical[static_cast<std::size_t>(wb)] = la;
        if (la != -1) layout[static_cast<std::size_t>(la)] = wb;
        if (lb != -1) layout[static_cast<std::size_t>(lb)] = wa;
    };

    for (const Gate& g : circuit.gates()) {
        if (g.arity() == 1) {
            Gate moved = g;
            moved.qubits[0] = layout[static_cast<std::size_t>(g.qubits[0])];
            result.routed.add_raw(moved);
            continue;
        }
        int wa = layout[static_cast<std::size_t>(g.qubits[0])];
        const int wb = layout[static_cast<std::size_t>(g.qubits[1])];
        if (!coupling.adjacent(wa, wb)) {
            const auto path = coupling.shortest_path(wa, wb);
            // walk the first operand down the path until adjacent
            for (std::size_t i = 0; i + 2 < path.size(); ++i) {
                swap_wires(path[i], path[i + 1]);
            }
            wa = layout[static_cast<std::size_t>(g.qubits[0])];
        }
        Gate moved = g;
        moved.qubits[0] = wa;
        moved.qubits[1] = wb;
        result.routed.add_raw(moved);
    }
    result.layout = layout;
    return result;
}

TranspiledCircuit transpile(const Circuit& circuit, const BackendModel& backend) {
    TranspiledCircuit out;
    out.logical_counts = gate_counts(decompose_to_basis(circuit, backend));
    RouteResult routed = route(circuit, backend.coupling);
    out.physical = decompose_to_basis(routed.routed, backend);
    out.physical_counts = gate_counts(out.physical);
    out.layout = std::move(routed.layout);
    out.swap_count = routed.swap_count;
    return out;
}

double gate_duration(GateKind kind, const Calibration& calibration,
                     const ScheduleOptions& options) {
    switch (classify(kind)) {
        case GateClass::OneQubit:
            if (kind == GateKind::Rz && options.zero_rz) return 0.0;
            return calibration.t_1q;
        case GateClass::TwoQubit: {
            const auto name = std::string(gate_name(kind));
            const auto it = calibration.t_2q_by_gate.find(name);
            if (it != calibration.t_2q_by_gate.end()) return it->second;
            return calibration.t_2q_scalar();
        }
        case GateClass::Measurement:
            return calibration.t_meas;
    }
    return 0.0;
}

double asap_schedule(const Circuit& circuit, const Calibration& calibration,
                     const ScheduleOptions& options) {
    std::vector<double> free_at(static_cast<std::size_t>(circuit.n_qubits()), 0.0);
    double makespan = 0.0;
    for (const Gate& g : circuit.gates()) {
        const double duration = gate_duration(g.kind, calibration, options);
        double start = free_at[static_cast<std::size_t>(g.qubits[0])];
        if (g.arity() == 2)
            start = std::max(start, free_at[static_cast<std::size_t>(g.qubits[1])]);
        const double end = start + duration;
        free_at[static_cast<std::size_t>(g.qubits[0])] = end;
        if (g.arity() == 2) free_at[static_cast<std::size_t>(g.qubits[1])] = end;
        makespan = std::max(makespan, end);
    }
    return makespan;
}

}  // namespace qcostnas
