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
 * @file transpiler.hpp
 * Logical-to-physical compilation: decomposition onto a backend's native
 * basis, greedy shortest-path SWAP routing onto its coupling map, and an
 * as-soon-as-possible list scheduler for makespan estimation.
 *
 * The rewrite rule table is fixed per basis and documented in
 * docs/decomposition_rules.md; reproducibility is preferred over optimality,
 * and bit parity with any vendor transpiler is a non-goal.
 */

#pragma once

#include <cstdint>
#include <vector>

#include "qcostnas/backend.hpp"
#include "qcostnas/circuit.hpp"

namespace qcostnas {

struct TranspiledCircuit {
    /// Connectivity-legal circuit over the backend's physical register,
    /// native gates only.
    Circuit physical = Circuit(1);
    /// Counts of the basis-decomposed circuit under an all-to-all map
    /// (no routing).
    GateCounts logical_counts;
    /// Counts of the routed and decomposed circuit.
    GateCounts physical_counts;
    /// Final placement: layout[logical] = physical wire after routing.
    std::vector<int> layout;
    std::int64_t swap_count = 0;
};

/// Rewrites every gate into the backend's native basis; parameter bindings
/// survive with folded scale/offset. Throws UnsupportedGateError when the
/// basis cannot express a rotation (e.g. no rz or sx available).
Circuit decompose_to_basis(const Circuit& circuit, const BackendModel& backend);

struct RouteResult {
    Circuit routed;          // logical gate set plus inserted SWAPs, physical wires
    std::vector<int> layout; // final logical -> physical map
    std::int64_t swap_count = 0;
};

/// Greedy router: walks the gate list, and for each two-qubit gate on
/// non-adjacent wires inserts SWAPs along the BFS shortest path until the
/// operands meet. The layout permutation is tracked; SWAPs persist.
RouteResult route(const Circuit& circuit, const CouplingMap& coupling,
                  std::vector<int> initial_layout = {});

/// route then decompose; logical counts come from decomposition alone.
TranspiledCircuit transpile(const Circuit& circuit, const BackendModel& backend);

struct ScheduleOptions {
    /// Treat native phase rotations (rz) as zero-duration, mirroring
    /// schedulers that implement them virtually.
    bool zero_rz = false;
};

/// Earliest-start list schedule: each gate begins once all its qubits are
/// free. Returns the completion time of the last gate in seconds.
double asap_schedule(const Circuit& circuit, const Calibration& calibration,
                     const ScheduleOptions& options = {});

/// Duration convention shared by the scheduler and the gate-time model:
/// one-qubit gates take t_1q, native two-qubit gates their calibrated time,
/// SWAP one native two-qubit duration (IR-level), measurements t_meas.
double gate_duration(GateKind kind, const Calibration& calibration,
                     const ScheduleOptions& options = {});

}  // namespace qcostnas
