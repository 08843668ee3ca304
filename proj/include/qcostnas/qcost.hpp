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
 * @file qcost.hpp
 * Analytical quantum cost model: calibrated gate execution time, routing
 * overhead from excess native two-qubit gates, gate-error and decoherence
 * failure probabilities, the sampling-inefficiency inflation, parameter-shift
 * gradient evaluations, and training-duration scaling. All times in seconds.
 *
 * Every function here is a deterministic pure function of (counts,
 * calibration, plan); evaluation workers call them concurrently.
 */

#pragma once

#include <cstdint>

#include <json.hpp>

#include "qcostnas/backend.hpp"
#include "qcostnas/circuit.hpp"
#include "qcostnas/transpiler.hpp"

namespace qcostnas {

struct TrainingPlan {
    std::int64_t n_params = 0;  // trainable quantum circuit parameters
    std::int64_t n_steps = 0;   // optimizer steps over the whole training run
};

/// Every intermediate and final quantity of the quantum cost model, per
/// training step and totaled. reliability_penalty is the extra effective
/// time attributable to noise: t_eff - (t_logical + t_routing).
struct QuantumCostBreakdown {
    double t_gate = 0.0;
    double t_routing = 0.0;
    double t_logical = 0.0;
    double p_gate = 0.0;
    double p_decoh = 0.0;
    double p_fail = 0.0;
    double t_eff = 0.0;
    std::int64_t n_eval = 0;
    double t_quantum = 0.0;        // per optimizer step
    double t_quantum_total = 0.0;  // scaled by n_steps
    double reliability_penalty = 0.0;
};

/// p_fail at or beyond 1 - kReliabilityGuard raises
/// ReliabilitySaturatedError instead of returning a near-infinite cost.
inline constexpr double kReliabilityGuard = 1e-9;

/// Step 1: T = N_1q*t_1q + sum_g N_2q^(g)*t_2q^(g) + N_meas*t_meas.
/// Two-qubit kinds absent from the calibration table fall back to the scalar
/// collapse (single-native backends make both forms identical).
double gate_execution_time(const GateCounts& counts, const Calibration& calibration);

/// Step 2: sum over native gate types of max(0, N_phys - N_logical) * t_2q.
double routing_overhead(const GateCounts& logical, const GateCounts& physical,
                        const Calibration& calibration);

struct FailureProbabilities {
    double p_gate = 0.0;
    double p_decoh = 0.0;
    double p_fail = 0.0;
};

/// Step 3: cumulative gate errors, exponential decoherence over t_gate/T2,
/// and their combination.
FailureProbabilities failure_probability(const GateCounts& counts,
                                         const Calibration& calibration, double t_gate);

/// Step 4: (t_logical + t_routing) / (1 - p_fail); an effective time
/// penalty for sampling inefficiency, not a hardware retry.
double effective_time(double t_logical, double t_routing, double p_fail);

/// Step 5: two circuit evaluations per parameter (shift rule).
std::int64_t gradient_evaluations(std::int64_t n_params);

/// Steps 1-6 composed from explicit counts.
QuantumCostBreakdown quantum_training_cost(const GateCounts& logical,
                                           const GateCounts& physical,
                                           const Calibration& calibration,
                                           const TrainingPlan& plan);

QuantumCostBreakdown quantum_training_cost(const TranspiledCircuit& transpiled,
                                           const Calibration& calibration,
                                           const TrainingPlan& plan);

nlohmann::json to_json(const QuantumCostBreakdown& breakdown);
QuantumCostBreakdown quantum_cost_from_json(const nlohmann::json& doc);

}  // namespace qcostnas
