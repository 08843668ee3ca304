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
 * @file backend.hpp
 * Device model: coupling map, native basis and calibration record, loaded
 * from JSON files or bundled presets. Immutable after load; every cost
 * evaluation reads it concurrently.
 *
 * File schema is documented in docs/backend_schema.md and versioned through
 * a "schema_version" field.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcostnas/circuit.hpp"
#include "qcostnas/errors.hpp"

namespace qcostnas {

class CouplingMap {
  public:
    CouplingMap() = default;
    CouplingMap(int n_physical, std::vector<std::pair<int, int>> edges);

    int n_physical() const { return n_physical_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int q) const;
    bool adjacent(int a, int b) const;
    bool connected() const;

    /// BFS shortest path (inclusive endpoints); equal-length ties resolved
    /// toward the lowest-index neighbor, so routing is deterministic.
    std::vector<int> shortest_path(int from, int to) const;

    bool operator==(const CouplingMap&) const = default;

  private:
    int n_physical_ = 0;
    std::vector<std::pair<int, int>> edges_;       // normalized a < b, sorted
    std::vector<std::vector<int>> adjacency_;      // sorted neighbor lists
};

/// Scalar calibration record consumed by the analytical cost model. All
/// durations are seconds; error rates are probabilities in [0, 1).
struct Calibration {
    double t_1q = 0.0;
    std::map<std::string, double> t_2q_by_gate;
    double t_meas = 0.0;
    double eps_1q = 0.0;
    double eps_2q = 0.0;
    double eps_meas = 0.0;
    double t2 = 0.0;
    /// Recorded from calibration data but not consumed by the cost model.
    std::optional<double> t1;

    /// Duration of a named native two-qubit gate.
    double t_2q(const std::string& gate) const;
    /// Scalar collapse: the single native duration, or the median across
    /// gate types when several are calibrated.
    double t_2q_scalar() const;

    void validate() const;

    bool operator==(const Calibration&) const = default;
};

/// Raw per-qubit / per-edge tables, aggregated to scalars via the median.
struct CalibrationTables {
    std::vector<double> t_1q;
    std::map<std::string, std::vector<double>> t_2q;
    std::vector<double> t_meas;
    std::vector<double> eps_1q;
    std::vector<double> eps_2q;
    std::vector<double> eps_meas;
    std::vector<double> t2;
    std::vector<double> t1;
};

/// Median of a non-empty table; even-sized tables average the middle pair.
double median(std::vector<double> values);

/// Median-aggregates every table; empty required tables raise
/// CalibrationFormatError. T1 is kept if present, never modeled.
Calibration aggregate_calibration(const CalibrationTables& tables);

struct NativeBasis {
    std::vector<GateKind> one_qubit = {GateKind::Rz, GateKind::Sx, GateKind::X};
    GateKind two_qubit = GateKind::Cnot;

    bool has_one_qubit(GateKind kind) const;
    std::string two_qubit_name() const { return std::string(gate_name(two_qubit)); }

    bool operator==(const NativeBasis&) const = default;
};

struct BackendModel {
    std::string name;
    CouplingMap coupling;
    NativeBasis basis;
    Calibration calibration;

    bool operator==(const BackendModel&) const = default;
};

inline constexpr int kBackendSchemaVersion = 1;

BackendModel backend_from_json(const nlohmann::json& doc);
nlohmann::json backend_to_json(const BackendModel& model);

/// Loads from a filesystem path, or from a bundled preset when the argument
/// names one ("fake_linear7", "fake_heavyhex27", "fake_grid16").
BackendModel load_backend(const std::string& path_or_preset);

void store_backend(const BackendModel& model, const std::string& path);

std::vector<std::string> preset_names();
bool is_preset_name(const std::string& name);
/// Raw JSON text of a bundled preset.
std::string preset_json(const std::string& name);

}  // namespace qcostnas
