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
 * @file reports.hpp
 * Report generation behind the command line: scheduler validation, quantum
 * cost ablation, Pareto exports (CSV/JSON/SVG) and the exact hypervolume
 * indicator. All primary outputs are byte-reproducible under fixed seeds;
 * doubles print with "%.17g" in the C locale.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcostnas/backend.hpp"
#include "qcostnas/nas.hpp"
#include "qcostnas/transpiler.hpp"

namespace qcostnas {

struct ValidationRow {
    int circuit_id = 0;
    int n_qubits = 0;
    int depth = 0;
    double t_gate = 0.0;            // analytical, Step-1 style, seconds
    double makespan = 0.0;          // ASAP schedule
    double makespan_zero_rz = 0.0;  // ASAP with zero-duration rz
    double gap = 0.0;               // (t_gate - makespan) / t_gate
    double gap_zero_rz = 0.0;
};

struct ValidationReport {
    std::string backend;
    std::uint64_t seed = 0;
    std::vector<ValidationRow> rows;
    double mean_gap = 0.0;
    double mean_gap_zero_rz = 0.0;
};

/// Random circuits (default 100, 2-5 qubits, depth 50-600) transpiled and
/// costed against the backend; every row satisfies t_gate >= makespan.
ValidationReport cmd_validate_scheduler(const BackendModel& backend, int n_circuits = 100,
                                        int qubits_min = 2, int qubits_max = 5,
                                        int depth_min = 50, int depth_max = 600,
                                        std::uint64_t seed = 1);

std::string validation_csv(const ValidationReport& report);

struct AblationRow {
    std::string genome;          // canonical key
    int n_qubits = 0;
    int depth = 0;
    std::string topology;
    double t_logical = 0.0;      // per-step seconds, gradient factor excluded
    double t_routing = 0.0;
    double reliability_penalty = 0.0;
    double t_eff = 0.0;
    double accuracy = 0.0;
};

struct AblationReport {
    std::vector<AblationRow> rows;  // sorted by t_eff descending
    int skipped_saturated = 0;
};

/// Per-architecture decomposition of the final front's per-step quantum
/// time; the gradient-evaluation multiplier is excluded because it scales
/// uniformly across architectures.
AblationReport cmd_ablate(const ParetoArchive& archive);

std::string ablation_csv(const AblationReport& report);

struct ExportOptions {
    bool csv = true;
    bool json = true;
    bool svg = false;
};

struct ExportPaths {
    std::vector<std::string> files;
};

/// Writes generations.csv, final_front.csv, archive.json and (optionally)
/// one SVG scatter per objective pair into `out_dir`.
ExportPaths cmd_export_pareto(const ParetoArchive& archive, const std::string& out_dir,
                              const ExportOptions& options = {});

std::string generations_csv(const ParetoArchive& archive);
std::string final_front_csv(const ParetoArchive& archive);

/// Exact hypervolume (minimization) of `points` against `reference` by
/// recursive slicing; every point must weakly dominate the reference.
double hypervolume(std::span<const std::array<double, 4>> points,
                   const std::array<double, 4>& reference);

/// Reference point enclosing both sets with a 10% margin, for
/// hypervolume comparisons across generations.
std::array<double, 4> hypervolume_reference(std::span<const std::array<double, 4>> a,
                                            std::span<const std::array<double, 4>> b);

/// Objective vectors of a generation's rank-1 members.
std::vector<std::array<double, 4>> front_objectives(const GenerationRecord& record);
std::vector<std::array<double, 4>> front_objectives(const std::vector<EvaluatedGenome>& front);

/// Generation-colored scatter of two objective axes; returns the SVG text.
std::string pareto_svg(const ParetoArchive& archive, int axis_x, int axis_y);

std::string format_double(double v);

}  // namespace qcostnas
