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

// Bundled fake backends. Calibration values sit inside the ranges typical of
// current superconducting devices (t_2q ~ 200-350 ns, t_1q ~ 30-50 ns) and
// are fixed so results reproduce offline.

#include "qcostnas/backend.hpp"

namespace qcostnas {

namespace {

// 7 qubits in a line, ECR native two-qubit gate.
constexpr const char* kFakeLinear7 = R"JSON({
  "schema_version": 1,
  "name": "fake_linear7",
  "n_qubits": 7,
  "coupling_map": [[0,1],[1,2],[2,3],[3,4],[4,5],[5,6]],
  "basis": {"one_qubit": ["rz", "sx", "x"], "two_qubit": "ecr"},
  "calibration": {
    "time_unit": "ns",
    "t_1q": 35,
    "t_2q": {"ecr": 300},
    "t_meas": 1200,
    "eps_1q": 1e-3,
    "eps_2q": 1e-2,
    "eps_meas": 2e-2,
    "t2": 100000,
    "t1": 150000
  }
})JSON";

// 27-qubit heavy-hex fragment, CX native.
constexpr const char* kFakeHeavyHex27 = R"JSON({
  "schema_version": 1,
  "name": "fake_heavyhex27",
  "n_qubits": 27,
  "coupling_map": [[0,1],[1,2],[1,4],[2,3],[3,5],[4,7],[5,8],[6,7],[7,10],
                   [8,9],[8,11],[10,12],[11,14],[12,13],[12,15],[13,14],
                   [14,16],[15,18],[16,19],[17,18],[18,21],[19,20],[19,22],
                   [21,23],[22,25],[23,24],[24,25],[25,26]],
  "basis": {"one_qubit": ["rz", "sx", "x"], "two_qubit": "cnot"},
  "calibration": {
    "time_unit": "ns",
    "t_1q": 50,
    "t_2q": {"cnot": 330},
    "t_meas": 800,
    "eps_1q": 4e-4,
    "eps_2q": 8e-3,
    "eps_meas": 1.5e-2,
    "t2": 120000,
    "t1": 180000
  }
})JSON";

// 4x4 lattice, CZ native.
constexpr const char* kFakeGrid16 = R"JSON({
  "schema_version": 1,
  "name": "fake_grid16",
  "n_qubits": 16,
  "coupling_map": [[0,1],[1,2],[2,3],[4,5],[5,6],[6,7],[8,9],[9,10],[10,11],
                   [12,13],[13,14],[14,15],[0,4],[4,8],[8,12],[1,5],[5,9],
                   [9,13],[2,6],[6,10],[10,14],[3,7],[7,11],[11,15]],
  "basis": {"one_qubit": ["rz", "sx", "x"], "two_qubit": "cz"},
  "calibration": {
    "time_unit": "ns",
    "t_1q": 40,
    "t_2q": {"cz": 250},
    "t_meas": 1000,
    "eps_1q": 7e-4,
    "eps_2q": 6e-3,
    "eps_meas": 1.8e-2,
    "t2": 90000,
    "t1": 140000
  }
})JSON";

}  // namespace

std::vector<std::string> preset_names() {
    return {"fake_linear7", "fake_heavyhex27", "fake_grid16"};
}

bool is_preset_name(const std::string& name) {
    return name == "fake_linear7" || name == "fake_heavyhex27" || name == "fake_grid16";
}

std::string preset_json(const std::string& name) {
    if (name == "fake_linear7") return kFakeLinear7;
    if (name == "fake_heavyhex27") return kFakeHeavyHex27;
    if (name == "fake_grid16") return kFakeGrid16;
    throw InvalidArgumentError("unknown preset '" + name + "'");
}

}  // namespace qcostnas
