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

#include "qcostnas/qcost.hpp"

#include <algorithm>
#include <cmath>

namespace qcostnas {

namespace {

void check_counts(const GateCounts& counts) {
    if (counts.one_qubit < 0 || counts.two_qubit < 0 || counts.measure < 0)
        throw InvalidArgumentError("gate counts must be non-negative");
    for (const auto& [_, n] : counts.two_qubit_by_kind)
        if (n < 0) throw InvalidArgumentError("gate counts must be non-negative");
}

/// Typed two-qubit time; falls back to the scalar duration when the count
/// map is empty (counts supplied by hand rather than from a circuit).
double two_qubit_time(const GateCounts& counts, const Calibration& calibration) {
    if (counts.two_qubit_by_kind.empty())
        return static_cast<double>(counts.two_qubit) * calibration.t_2q_scalar();
    double total = 0.0;
    std::int64_t typed = 0;
    for (const auto& [kind, n] : counts.two_qubit_by_kind) {
        total += static_cast<double>(n) * calibration.t_2q(std::string(gate_name(kind)));
        typed += n;
    }
    // untyped remainder (possible for hand-built counts)
    if (typed < counts.two_qubit)
        total += static_cast<double>(counts.two_qubit - typed) * calibration.t_2q_scalar();
    return total;
}

}  // namespace

double gate_execution_time(const GateCounts& counts, const Calibration& calibration) {
    check_counts(counts);
    return static_cast<double>(counts.one_qubit) * calibration.t_1q +
           two_qubit_time(counts, calibration) +
           static_cast<double>(counts.measure) * calibration.t_meas;
}

double routing_overhead(const GateCounts& logical, const GateCounts& physical,
                        const Calibration& calibration) {
    check_counts(logical);
    check_counts(physical);
    double total = 0.0;
    if (physical.two_qubit_by_kind.empty() && logical.two_qubit_by_kind.empty()) {
        const std::int64_t excess = std::max<std::int64_t>(
            0, physical.two_qubit - logical.two_qubit);
        return static_cast<double>(excess) * calibration.t_2q_scalar();
    }
    for (const auto& [kind, n_phys] : physical.two_qubit_by_kind) {
        std::int64_t n_logical = 0;
        if (const auto it = logical.two_qubit_by_kind.find(kind);
            it != logical.two_qubit_by_kind.end())
            n_logical = it->second;
        const std::int64_t excess = std::max<std::int64_t>(0, n_phys - n_logical);
        total += static_cast<double>(excess) * calibration.t_2q(std::string(gate_name(kind)));
    }
    return total;
}

FailureProbabilities failure_probability(const GateCounts& counts,
                                         const Calibration& calibration, double t_gate) {
    check_counts(counts);
    if (calibration.eps_1q >= 1.0 || calibration.eps_2q >= 1.0 || calibration.eps_meas >= 1.0 ||
        calibration.eps_1q < 0.0 || calibration.eps_2q < 0.0 || calibration.eps_meas < 0.0)
        throw CalibrationFormatError("error rates must lie in [0, 1)");
    if (!(calibration.t2 > 0.0)) throw CalibrationFormatError("t2 must be positive");
    if (t_gate < 0.0) throw InvalidArgumentError("t_gate must be non-negative");

    FailureProbabilities out;
    const double p_success =
        std::pow(1.0 - calibration.eps_1q, static_cast<double>(counts.one_qubit)) *
        std::pow(1.0 - calibration.eps_2q, static_cast<double>(counts.two_qubit)) *
        std::pow(1.0 - calibration.eps_meas, static_cast<double>(counts.measure));
    out.p_gate = 1.0 - p_success;
    out.p_decoh = 1.0 - std::exp(-t_gate / calibration.t2);
    out.p_fail = 1.0 - (1.0 - out.p_gate) * (1.0 - out.p_decoh);
    return out;
}

double effective_time(double t_logical, double t_routing, double p_fail) {
    if (p_fail < 0.0 || p_fail > 1.0)
        throw InvalidArgumentError("p_fail must lie in [0, 1]");
    if (p_fail >= 1.0 - kReliabilityGuard)
        throw ReliabilitySaturatedError(
            "circuit failure probability saturated (p_fail >= 1 - 1e-9); the sampling "
            "inflation is no longer meaningful");
    return (t_logical + t_routing) / (1.0 - p_fail);
}

std::int64_t gradient_evaluations(std::int64_t n_params) {
    if (n_params < 0) throw InvalidArgumentError("n_params must be non-negative");
    return 2 * n_params;
}

QuantumCostBreakdown quantum_training_cost(const GateCounts& logical,
                                           const GateCounts& physical,
                                           const Calibration& calibration,
                                           const TrainingPlan& plan) {
    if (plan.n_params < 0 || plan.n_steps < 0)
        throw InvalidArgumentError("training plan entries must be non-negative");
    QuantumCostBreakdown b;
    b.t_gate = gate_execution_time(physical, calibration);
    b.t_routing = routing_overhead(logical, physical, calibration);
    b.t_logical = b.t_gate - b.t_routing;
    const auto probs = failure_probability(physical, calibration, b.t_gate);
    b.p_gate = probs.p_gate;
    b.p_decoh = probs.p_decoh;
    b.p_fail = probs.p_fail;
    b.t_eff = effective_time(b.t_logical, b.t_routing, b.p_fail);
    b.reliability_penalty = b.t_eff - (b.t_logical + b.t_routing);
    b.n_eval = gradient_evaluations(plan.n_params);
    b.t_quantum = b.t_eff * static_cast<double>(b.n_eval);
    b.t_quantum_total = b.t_quantum * static_cast<double>(plan.n_steps);
    return b;
}

QuantumCostBreakdown quantum_training_cost(const TranspiledCircuit& transpiled,
                                           const Calibration& calibration,
                                           const TrainingPlan& plan) {
    return quantum_training_cost(transpiled.logical_counts, transpiled.physical_counts,
                                 calibration, plan);
}

nlohmann::json to_json(const QuantumCostBreakdown& b) {
    return nlohmann::json{
        {"t_gate", b.t_gate},
        {"t_routing", b.t_routing},
        {"t_logical", b.t_logical},
        {"p_gate", b.p_gate},
        {"p_decoh", b.p_decoh},
        {"p_fail", b.p_fail},
        {"t_eff", b.t_eff},
        {"n_eval", b.n_eval},
        {"t_quantum", b.t_quantum},
        {"t_quantum_total", b.t_quantum_total},
        {"reliability_penalty", b.reliability_penalty},
    };
}

QuantumCostBreakdown quantum_cost_from_json(const nlohmann::json& doc) {
    QuantumCostBreakdown b;
    b.t_gate = doc.at("t_gate").get<double>();
    b.t_routing = doc.at("t_routing").get<double>();
    b.t_logical = doc.at("t_logical").get<double>();
    b.p_gate = doc.at("p_gate").get<double>();
    b.p_decoh = doc.at("p_decoh").get<double>();
    b.p_fail = doc.at("p_fail").get<double>();
    b.t_eff = doc.at("t_eff").get<double>();
    b.n_eval = doc.at("n_eval").get<std::int64_t>();
    b.t_quantum = doc.at("t_quantum").get<double>();
    b.t_quantum_total = doc.at("t_quantum_total").get<double>();
    b.reliability_penalty = doc.at("reliability_penalty").get<double>();
    return b;
}

}  // namespace qcostnas
