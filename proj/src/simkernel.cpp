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

#include "qcostnas/simkernel.hpp"

#include <cmath>

namespace qcostnas {

namespace {

using cdouble = std::complex<double>;
constexpr cdouble kI{0.0, 1.0};

void rotation_matrix(GateKind kind, double angle, cdouble m[4], bool dagger) {
    const double half = dagger ? -0.5 * angle : 0.5 * angle;
    const double c = std::cos(half);
    const double s = std::sin(half);
    switch (kind) {
        case GateKind::Rx:
            m[0] = c;
            m[1] = -kI * s;
            m[2] = -kI * s;
            m[3] = c;
            break;
        case GateKind::Ry:
            m[0] = c;
            m[1] = -s;
            m[2] = s;
            m[3] = c;
            break;
        case GateKind::Rz:
            m[0] = cdouble{c, -s};
            m[1] = 0.0;
            m[2] = 0.0;
            m[3] = cdouble{c, s};
            break;
        default:
            throw InvalidArgumentError("not a rotation kind");
    }
}

void sx_matrix(cdouble m[4], bool dagger) {
    // SX = (1/2) [[1+i, 1-i], [1-i, 1+i]]
    const cdouble a = dagger ? cdouble{0.5, -0.5} : cdouble{0.5, 0.5};
    const cdouble b = std::conj(a);
    m[0] = a;
    m[1] = b;
    m[2] = b;
    m[3] = a;
}

// Two-qubit matrices in block basis index = bit(first) + 2*bit(second).
void cnot_matrix(cdouble m[16]) {
    for (int i = 0; i < 16; ++i) m[i] = 0.0;
    // control = first operand, target = second: j = c + 2t
    m[0 * 4 + 0] = 1.0;  // |c=0,t=0>
    m[2 * 4 + 2] = 1.0;  // |c=0,t=1>
    m[3 * 4 + 1] = 1.0;  // |c=1,t=0> -> |c=1,t=1>
    m[1 * 4 + 3] = 1.0;
}

void cz_matrix(cdouble m[16]) {
    for (int i = 0; i < 16; ++i) m[i] = 0.0;
    m[0] = m[5] = m[10] = 1.0;
    m[15] = -1.0;
}

void swap_matrix(cdouble m[16]) {
    for (int i = 0; i < 16; ++i) m[i] = 0.0;
    m[0 * 4 + 0] = 1.0;
    m[1 * 4 + 2] = 1.0;
    m[2 * 4 + 1] = 1.0;
    m[3 * 4 + 3] = 1.0;
}

void ecr_matrix(cdouble m[16]) {
    // ECR := (X_c (x) I - Y_c (x) X_t) / sqrt(2), c = first operand. Hermitian
    // and involutory, so the dagger equals the matrix itself.
    const double inv_sqrt2 = 0.70710678118654752440084436210485;
    for (int i = 0; i < 16; ++i) m[i] = 0.0;
    // X_c (x) I: flips the c bit (j -> j ^ 1)
    // Y_c (x) X_t: Y on c, X on t: j=(c,t) -> (1-c, 1-t) with Y phase i*(-1)^c
    for (int c = 0; c < 2; ++c) {
        for (int t = 0; t < 2; ++t) {
            const int col = c + 2 * t;
            const int row_x = (1 - c) + 2 * t;
            m[row_x * 4 + col] += inv_sqrt2;
            const int row_yx = (1 - c) + 2 * (1 - t);
            const cdouble y_phase = (c == 0) ? kI : -kI;
            m[row_yx * 4 + col] -= inv_sqrt2 * y_phase;
        }
    }
}

}  // namespace

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw InvalidArgumentError("statevector needs at least one qubit");
    if (n_qubits > kMaxSimQubits)
        throw CapacityError("statevector capacity is " + std::to_string(kMaxSimQubits) +
                            " qubits, got " + std::to_string(n_qubits));
    amps_.assign(std::size_t{1} << n_qubits, 0.0);
    amps_[0] = 1.0;
}

double Statevector::norm() const {
    double sum = 0.0;
    for (const cdouble& a : amps_) sum += std::norm(a);
    return std::sqrt(sum);
}

void Statevector::apply_one_qubit(const cdouble m[4], int qubit) {
    const std::size_t step = std::size_t{1} << qubit;
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += 2 * step) {
        for (std::size_t i = base; i < base + step; ++i) {
            const cdouble a0 = amps_[i];
            const cdouble a1 = amps_[i + step];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i + step] = m[2] * a0 + m[3] * a1;
        }
    }
}

void Statevector::apply_two_qubit(const cdouble m[16], int a, int b) {
    const std::size_t sa = std::size_t{1} << a;
    const std::size_t sb = std::size_t{1} << b;
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & sa) || (i & sb)) continue;
        const std::size_t idx[4] = {i, i | sa, i | sb, i | sa | sb};
        cdouble v[4];
        for (int k = 0; k < 4; ++k) v[k] = amps_[idx[k]];
        for (int r = 0; r < 4; ++r) {
            cdouble acc = 0.0;
            for (int c = 0; c < 4; ++c) acc += m[r * 4 + c] * v[c];
            amps_[idx[r]] = acc;
        }
    }
}

void Statevector::apply(const Gate& gate, double angle, bool dagger) {
    cdouble m2[4];
    cdouble m4[16];
    switch (gate.kind) {
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz:
            rotation_matrix(gate.kind, angle, m2, dagger);
            apply_one_qubit(m2, gate.qubits[0]);
            return;
        case GateKind::Sx:
            sx_matrix(m2, dagger);
            apply_one_qubit(m2, gate.qubits[0]);
            return;
        case GateKind::X:
            m2[0] = m2[3] = 0.0;
            m2[1] = m2[2] = 1.0;
            apply_one_qubit(m2, gate.qubits[0]);
            return;
        case GateKind::Cnot:
            cnot_matrix(m4);
            break;
        case GateKind::Cz:
            cz_matrix(m4);
            break;
        case GateKind::Swap:
            swap_matrix(m4);
            break;
        case GateKind::Ecr:
            ecr_matrix(m4);
            break;
        case GateKind::Measure:
            return;  // no state evolution
    }
    apply_two_qubit(m4, gate.qubits[0], gate.qubits[1]);
}

double realized_angle(const Gate& gate, std::span<const double> params,
                      std::span<const double> inputs) {
    switch (gate.param.source) {
        case ParamBinding::Source::Fixed:
            return gate.param.offset;
        case ParamBinding::Source::Trainable:
            if (gate.param.slot < 0 || static_cast<std::size_t>(gate.param.slot) >= params.size())
                throw InvalidArgumentError("parameter vector too short for circuit");
            return gate.param.scale * params[static_cast<std::size_t>(gate.param.slot)] +
                   gate.param.offset;
        case ParamBinding::Source::Input:
            if (gate.param.slot < 0 || static_cast<std::size_t>(gate.param.slot) >= inputs.size())
                throw InvalidArgumentError("input vector too short for circuit");
            return gate.param.scale * inputs[static_cast<std::size_t>(gate.param.slot)] +
                   gate.param.offset;
    }
    return 0.0;
}

namespace {

void check_sizes(const Circuit& circuit, std::span<const double> params,
                 std::span<const double> inputs) {
    if (static_cast<int>(params.size()) != circuit.n_params())
        throw InvalidArgumentError("expected " + std::to_string(circuit.n_params()) +
                                   " parameters, got " + std::to_string(params.size()));
    if (static_cast<int>(inputs.size()) != circuit.n_inputs())
        throw InvalidArgumentError("expected " + std::to_string(circuit.n_inputs()) +
                                   " inputs, got " + std::to_string(inputs.size()));
}

/// Runs the circuit with one gate's realized angle overridden.
std::vector<double> expectations_with_override(const Circuit& circuit,
                                               std::span<const double> params,
                                               std::span<const double> inputs,
                                               std::size_t gate_index, double angle) {
    Statevector state(circuit.n_qubits());
    const auto& gates = circuit.gates();
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const double theta =
            (i == gate_index) ? angle : realized_angle(gates[i], params, inputs);
        state.apply(gates[i], theta);
    }
    return expect_z(state);
}

/// Applies the rotation generator (X/Y/Z) of a rotation kind.
void apply_generator(Statevector& state, GateKind kind, int qubit) {
    cdouble m[4];
    switch (kind) {
        case GateKind::Rx:
            m[0] = m[3] = 0.0;
            m[1] = m[2] = 1.0;
            break;
        case GateKind::Ry:
            m[0] = m[3] = 0.0;
            m[1] = -kI;
            m[2] = kI;
            break;
        case GateKind::Rz:
            m[0] = 1.0;
            m[1] = m[2] = 0.0;
            m[3] = -1.0;
            break;
        default:
            throw UnsupportedGradientError("gate has no shift-rule generator");
    }
    state.apply_one_qubit(m, qubit);
}

}  // namespace

Statevector run(const Circuit& circuit, std::span<const double> params,
                std::span<const double> inputs) {
    check_sizes(circuit, params, inputs);
    Statevector state(circuit.n_qubits());
    for (const Gate& g : circuit.gates()) state.apply(g, realized_angle(g, params, inputs));
    return state;
}

std::vector<double> expect_z(const Statevector& state) {
    std::vector<double> out(static_cast<std::size_t>(state.n_qubits()), 0.0);
    const auto& amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p == 0.0) continue;
        for (int q = 0; q < state.n_qubits(); ++q)
            out[static_cast<std::size_t>(q)] += (i >> q) & 1 ? -p : p;
    }
    return out;
}

GradientResult grad_parameter_shift(const Circuit& circuit, std::span<const double> params,
                                    std::span<const double> inputs) {
    check_sizes(circuit, params, inputs);
    const int n_out = circuit.n_qubits();
    GradientResult result{n_out, circuit.n_params(),
                          std::vector<double>(static_cast<std::size_t>(n_out) *
                                                  static_cast<std::size_t>(circuit.n_params()),
                                              0.0)};
    const double half_pi = 1.5707963267948966192313216916398;
    const auto& gates = circuit.gates();
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        if (g.param.source != ParamBinding::Source::Trainable) continue;
        if (!is_rotation(g.kind))
            throw UnsupportedGradientError("trainable gate without a shift rule");
        const double angle = realized_angle(g, params, inputs);
        const auto plus = expectations_with_override(circuit, params, inputs, i, angle + half_pi);
        const auto minus = expectations_with_override(circuit, params, inputs, i, angle - half_pi);
        for (int o = 0; o < n_out; ++o)
            result.at(o, g.param.slot) +=
                g.param.scale * 0.5 *
                (plus[static_cast<std::size_t>(o)] - minus[static_cast<std::size_t>(o)]);
    }
    return result;
}

QuantumJacobians adjoint_jacobians(const Circuit& circuit, std::span<const double> params,
                                   std::span<const double> inputs) {
    check_sizes(circuit, params, inputs);
    const int n_out = circuit.n_qubits();
    const auto zeros = [n_out](int cols) {
        return GradientResult{n_out, cols,
                              std::vector<double>(static_cast<std::size_t>(n_out) *
                                                      static_cast<std::size_t>(cols),
                                                  0.0)};
    };
    QuantumJacobians jac{zeros(circuit.n_params()), zeros(circuit.n_inputs())};

    // Forward state.
    Statevector ket = run(circuit, params, inputs);
    // One bra per output: Z_q |psi>.
    std::vector<Statevector> bras;
    bras.reserve(static_cast<std::size_t>(n_out));
    for (int q = 0; q < n_out; ++q) {
        Statevector bra = ket;
        cdouble z[4] = {1.0, 0.0, 0.0, -1.0};
        bra.apply_one_qubit(z, q);
        bras.push_back(std::move(bra));
    }

    const auto& gates = circuit.gates();
    for (std::size_t idx = gates.size(); idx-- > 0;) {
        const Gate& g = gates[idx];
        const double angle = realized_angle(g, params, inputs);
        const bool differentiable = g.param.source == ParamBinding::Source::Trainable ||
                                    g.param.source == ParamBinding::Source::Input;
        if (differentiable) {
            if (!is_rotation(g.kind))
                throw UnsupportedGradientError("bound gate without a generator");
            // d<Z_q>/d(angle) = Im(<bra_q| G |ket>) with U = exp(-i angle G / 2).
            Statevector g_ket = ket;
            apply_generator(g_ket, g.kind, g.qubits[0]);
            GradientResult& target =
                g.param.source == ParamBinding::Source::Trainable ? jac.d_params : jac.d_inputs;
            for (int o = 0; o < n_out; ++o) {
                cdouble inner = 0.0;
                const auto& b = bras[static_cast<std::size_t>(o)].amplitudes();
                const auto& k = g_ket.amplitudes();
                for (std::size_t i = 0; i < b.size(); ++i) inner += std::conj(b[i]) * k[i];
                target.at(o, g.param.slot) += g.param.scale * inner.imag();
            }
        }
        // Unapply the gate from ket and every bra.
        ket.apply(g, angle, /*dagger=*/true);
        for (auto& bra : bras) bra.apply(g, angle, /*dagger=*/true);
    }
    return jac;
}

GradientResult grad_adjoint(const Circuit& circuit, std::span<const double> params,
                            std::span<const double> inputs) {
    return adjoint_jacobians(circuit, params, inputs).d_params;
}

}  // namespace qcostnas
