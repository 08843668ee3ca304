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
 * @file simkernel.hpp
 * Dense statevector simulation with exact expectation values and two gradient
 * methods: the parameter-shift rule (hardware-faithful oracle) and adjoint
 * differentiation (one forward plus one backward sweep, used for training).
 *
 * Qubit ordering is little-endian: qubit 0 is the least significant bit of
 * the amplitude index. Expectations are exact; nothing here samples shots.
 */

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcostnas/circuit.hpp"
#include "qcostnas/errors.hpp"

namespace qcostnas {

/// Hard capacity of the dense simulator (4096 amplitudes).
inline constexpr int kMaxSimQubits = 12;

class Statevector {
  public:
    explicit Statevector(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }
    std::vector<std::complex<double>>& amplitudes() { return amps_; }

    double norm() const;

    /// Applies a 2x2 matrix (row-major) to one qubit.
    void apply_one_qubit(const std::complex<double> m[4], int qubit);
    /// Applies a 4x4 matrix to (a, b); basis index within the block is
    /// bit(a) + 2*bit(b).
    void apply_two_qubit(const std::complex<double> m[16], int a, int b);
    /// Applies a gate; `angle` must be the realized rotation angle for
    /// rotation kinds and is ignored otherwise. Measurements are skipped.
    void apply(const Gate& gate, double angle, bool dagger = false);

  private:
    int n_qubits_;
    std::vector<std::complex<double>> amps_;
};

/// Realized angle of a gate under concrete parameter/input values.
double realized_angle(const Gate& gate, std::span<const double> params,
                      std::span<const double> inputs);

/// Evolves |0...0> through the circuit. Measurement gates are ignored.
Statevector run(const Circuit& circuit, std::span<const double> params = {},
                std::span<const double> inputs = {});

/// Per-qubit <Z_i> of a state; every component lies in [-1, 1].
std::vector<double> expect_z(const Statevector& state);

/// Dense Jacobian of per-qubit <Z> outputs with respect to a slot family.
struct GradientResult {
    int n_outputs = 0;
    int n_params = 0;
    std::vector<double> values;  // row-major: [output][param]

    double at(int output, int param) const {
        return values[static_cast<std::size_t>(output) * n_params + param];
    }
    double& at(int output, int param) {
        return values[static_cast<std::size_t>(output) * n_params + param];
    }
};

/// Parameter-shift gradients: two circuit executions per trainable gate at
/// gate angles shifted by +-pi/2, chain-ruled through the binding scale.
GradientResult grad_parameter_shift(const Circuit& circuit, std::span<const double> params,
                                    std::span<const double> inputs = {});

/// Adjoint-method gradients over trainable slots; matches parameter-shift to
/// numerical precision with a single forward and backward sweep.
GradientResult grad_adjoint(const Circuit& circuit, std::span<const double> params,
                            std::span<const double> inputs = {});

/// Adjoint sweep returning Jacobians for trainable slots and input slots in
/// one pass; the training loop needs both.
struct QuantumJacobians {
    GradientResult d_params;
    GradientResult d_inputs;
};
QuantumJacobians adjoint_jacobians(const Circuit& circuit, std::span<const double> params,
                                   std::span<const double> inputs);

}  // namespace qcostnas
