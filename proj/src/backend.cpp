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

#include "qcostnas/backend.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace qcostnas {

CouplingMap::CouplingMap(int n_physical, std::vector<std::pair<int, int>> edges)
    : n_physical_(n_physical) {
    if (n_physical < 1) throw InvalidBackendError("coupling map needs at least one qubit");
    adjacency_.assign(static_cast<std::size_t>(n_physical), {});
    for (auto [a, b] : edges) {
        if (a == b) throw InvalidBackendError("coupling map has a self edge");
        if (a < 0 || b < 0 || a >= n_physical || b >= n_physical)
            throw InvalidBackendError("coupling edge index out of range");
        if (a > b) std::swap(a, b);
        edges_.emplace_back(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto& [a, b] : edges_) {
        adjacency_[static_cast<std::size_t>(a)].push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

const std::vector<int>& CouplingMap::neighbors(int q) const {
    if (q < 0 || q >= n_physical_) throw InvalidArgumentError("physical qubit out of range");
    return adjacency_[static_cast<std::size_t>(q)];
}

bool CouplingMap::adjacent(int a, int b) const {
    const auto& row = neighbors(a);
    return std::binary_search(row.begin(), row.end(), b);
}

bool CouplingMap::connected() const {
    if (n_physical_ == 0) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n_physical_), false);
    std::deque<int> frontier{0};
    seen[0] = true;
    int count = 1;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        for (int nb : adjacency_[static_cast<std::size_t>(q)]) {
            if (!seen[static_cast<std::size_t>(nb)]) {
                seen[static_cast<std::size_t>(nb)] = true;
                ++count;
                frontier.push_back(nb);
            }
        }
    }
    return count == n_physical_;
}

std::vector<int> CouplingMap::shortest_path(int from, int to) const {
    if (from < 0 || from >= n_physical_ || to < 0 || to >= n_physical_)
        throw InvalidArgumentError("physical qubit out of range");
    if (from == to) return {from};
    std::vector<int> parent(static_cast<std::size_t>(n_physical_), -1);
    std::deque<int> frontier{from};
    parent[static_cast<std::size_t>(from)] = from;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        for (int nb : adjacency_[static_cast<std::size_t>(q)]) {  // sorted: lowest index first
            if (parent[static_cast<std::size_t>(nb)] != -1) continue;
            parent[static_cast<std::size_t>(nb)] = q;
            if (nb == to) {
                std::vector<int> path{to};
                int cur = to;
                while (cur != from) {
                    cur = parent[static_cast<std::size_t>(cur)];
                    path.push_back(cur);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            frontier.push_back(nb);
        }
    }
    throw InvalidBackendError("no path between physical qubits " + std::to_string(from) +
                              " and " + std::to_string(to));
}

double Calibration::t_2q(const std::string& gate) const {
    const auto it = t_2q_by_gate.find(gate);
    if (it != t_2q_by_gate.end()) return it->second;
    return t_2q_scalar();
}

double Calibration::t_2q_scalar() const {
    if (t_2q_by_gate.empty()) throw CalibrationFormatError("no two-qubit gate durations");
    std::vector<double> values;
    values.reserve(t_2q_by_gate.size());
    for (const auto& [_, v] : t_2q_by_gate) values.push_back(v);
    return median(std::move(values));
}

void Calibration::validate() const {
    const auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) throw CalibrationFormatError(std::string(what) + " must be positive");
    };
    const auto probability = [](double v, const char* what) {
        if (!(v >= 0.0) || v >= 1.0)
            throw CalibrationFormatError(std::string(what) + " must lie in [0, 1)");
    };
    positive(t_1q, "t_1q");
    positive(t_meas, "t_meas");
    if (t_2q_by_gate.empty()) throw CalibrationFormatError("t_2q table is empty");
    for (const auto& [gate, v] : t_2q_by_gate) positive(v, ("t_2q(" + gate + ")").c_str());
    probability(eps_1q, "eps_1q");
    probability(eps_2q, "eps_2q");
    probability(eps_meas, "eps_meas");
    positive(t2, "t2");
    if (t1 && !(*t1 > 0.0)) throw CalibrationFormatError("t1 must be positive when present");
}

double median(std::vector<double> values) {
    if (values.empty()) throw CalibrationFormatError("median of an empty table");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

Calibration aggregate_calibration(const CalibrationTables& tables) {
    const auto require = [](const std::vector<double>& t, const char* what) {
        if (t.empty()) throw CalibrationFormatError(std::string("empty table for ") + what);
        return median(t);
    };
    Calibration cal;
    cal.t_1q = require(tables.t_1q, "t_1q");
    if (tables.t_2q.empty()) throw CalibrationFormatError("empty table for t_2q");
    for (const auto& [gate, values] : tables.t_2q)
        cal.t_2q_by_gate[gate] = require(values, ("t_2q(" + gate + ")").c_str());
    cal.t_meas = require(tables.t_meas, "t_meas");
    cal.eps_1q = require(tables.eps_1q, "eps_1q");
    cal.eps_2q = require(tables.eps_2q, "eps_2q");
    cal.eps_meas = require(tables.eps_meas, "eps_meas");
    cal.t2 = require(tables.t2, "t2");
    if (!tables.t1.empty()) cal.t1 = median(tables.t1);
    return cal;
}

bool NativeBasis::has_one_qubit(GateKind kind) const {
    return std::find(one_qubit.begin(), one_qubit.end(), kind) != one_qubit.end();
}

namespace {

using nlohmann::json;

double time_unit_factor(const std::string& unit) {
    if (unit == "s") return 1.0;
    if (unit == "ms") return 1e-3;
    if (unit == "us") return 1e-6;
    if (unit == "ns") return 1e-9;
    throw CalibrationFormatError("unknown time unit '" + unit + "'");
}

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw CalibrationFormatError("missing or non-numeric field '" + key + "'");
    return j.at(key).get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw CalibrationFormatError("'" + key + "' must be an array");
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw CalibrationFormatError("'" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Calibration calibration_from_json(const json& doc) {
    const double unit = doc.contains("time_unit")
                            ? time_unit_factor(doc.at("time_unit").get<std::string>())
                            : 1.0;
    Calibration cal;
    if (doc.contains("per_qubit") || doc.contains("per_edge")) {
        CalibrationTables tables;
        const json pq = doc.value("per_qubit", json::object());
        const json pe = doc.value("per_edge", json::object());
        tables.t_1q = number_list(pq, "t_1q");
        tables.t_meas = number_list(pq, "t_meas");
        tables.eps_1q = number_list(pq, "eps_1q");
        tables.eps_meas = number_list(pq, "eps_meas");
        tables.t2 = number_list(pq, "t2");
        tables.t1 = number_list(pq, "t1");
        if (pe.contains("t_2q")) {
            if (!pe.at("t_2q").is_object())
                throw CalibrationFormatError("per_edge.t_2q must map gate name to array");
            for (const auto& item : pe.at("t_2q").items())
                tables.t_2q[item.key()] = number_list(pe.at("t_2q"), item.key());
        }
        tables.eps_2q = number_list(pe, "eps_2q");
        cal = aggregate_calibration(tables);
        // tables are in the declared unit; scale the time-valued aggregates
        cal.t_1q *= unit;
        cal.t_meas *= unit;
        for (auto& [_, v] : cal.t_2q_by_gate) v *= unit;
        cal.t2 *= unit;
        if (cal.t1) *cal.t1 *= unit;
    } else {
        cal.t_1q = require_number(doc, "t_1q") * unit;
        if (!doc.contains("t_2q"))
            throw CalibrationFormatError("missing field 't_2q'");
        if (doc.at("t_2q").is_number()) {
            // scalar shorthand: assigned to the backend's native gate later
            cal.t_2q_by_gate["*"] = doc.at("t_2q").get<double>() * unit;
        } else if (doc.at("t_2q").is_object()) {
            for (const auto& [gate, v] : doc.at("t_2q").items()) {
                if (!v.is_number())
                    throw CalibrationFormatError("t_2q entries must be numbers");
                cal.t_2q_by_gate[gate] = v.get<double>() * unit;
            }
        } else {
            throw CalibrationFormatError("t_2q must be a number or an object");
        }
        cal.t_meas = require_number(doc, "t_meas") * unit;
        cal.eps_1q = require_number(doc, "eps_1q");
        cal.eps_2q = require_number(doc, "eps_2q");
        cal.eps_meas = require_number(doc, "eps_meas");
        cal.t2 = require_number(doc, "t2") * unit;
        if (doc.contains("t1")) cal.t1 = require_number(doc, "t1") * unit;
    }
    return cal;
}

}  // namespace

BackendModel backend_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw CalibrationFormatError("backend document must be an object");
        if (!doc.contains("schema_version") ||
            doc.at("schema_version").get<int>() != kBackendSchemaVersion)
            throw CalibrationFormatError("unsupported or missing schema_version");
        BackendModel model;
        model.name = doc.value("name", std::string("unnamed"));
        const int n_qubits = static_cast<int>(require_number(doc, "n_qubits"));
        std::vector<std::pair<int, int>> edges;
        if (!doc.contains("coupling_map") || !doc.at("coupling_map").is_array())
            throw CalibrationFormatError("missing coupling_map array");
        for (const auto& e : doc.at("coupling_map")) {
            if (!e.is_array() || e.size() != 2)
                throw CalibrationFormatError("coupling_map entries must be pairs");
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
        model.coupling = CouplingMap(n_qubits, std::move(edges));
        if (!model.coupling.connected())
            throw InvalidBackendError("coupling map is not connected");

        if (!doc.contains("basis") || !doc.at("basis").is_object())
            throw CalibrationFormatError("missing basis object");
        const json& basis = doc.at("basis");
        model.basis.one_qubit.clear();
        for (const auto& name : basis.value("one_qubit", json::array())) {
            const auto kind = gate_from_name(name.get<std::string>());
            if (!kind || classify(*kind) != GateClass::OneQubit)
                throw CalibrationFormatError("bad one-qubit basis gate");
            model.basis.one_qubit.push_back(*kind);
        }
        if (model.basis.one_qubit.empty())
            throw CalibrationFormatError("basis needs at least one one-qubit gate");
        const auto two = gate_from_name(basis.value("two_qubit", std::string()));
        if (!two || classify(*two) != GateClass::TwoQubit || *two == GateKind::Swap)
            throw CalibrationFormatError("basis two_qubit must be cx, cz or ecr");
        model.basis.two_qubit = *two;

        if (!doc.contains("calibration"))
            throw CalibrationFormatError("missing calibration object");
        model.calibration = calibration_from_json(doc.at("calibration"));
        // resolve the scalar t_2q shorthand against the native gate name
        if (auto it = model.calibration.t_2q_by_gate.find("*");
            it != model.calibration.t_2q_by_gate.end()) {
            const double v = it->second;
            model.calibration.t_2q_by_gate.erase(it);
            model.calibration.t_2q_by_gate[model.basis.two_qubit_name()] = v;
        }
        model.calibration.validate();
        for (const auto& [gate, _] : model.calibration.t_2q_by_gate) {
            const auto kind = gate_from_name(gate);
            if (!kind || *kind != model.basis.two_qubit)
                throw CalibrationFormatError("t_2q gate '" + gate +
                                             "' is not in the native basis");
        }
        return model;
    } catch (const json::exception& e) {
        throw CalibrationFormatError(std::string("malformed backend JSON: ") + e.what());
    }
}

nlohmann::json backend_to_json(const BackendModel& model) {
    json doc;
    doc["schema_version"] = kBackendSchemaVersion;
    doc["name"] = model.name;
    doc["n_qubits"] = model.coupling.n_physical();
    json edges = json::array();
    for (const auto& [a, b] : model.coupling.edges()) edges.push_back({a, b});
    doc["coupling_map"] = edges;
    json one_qubit = json::array();
    for (GateKind k : model.basis.one_qubit) one_qubit.push_back(std::string(gate_name(k)));
    doc["basis"] = {{"one_qubit", one_qubit}, {"two_qubit", model.basis.two_qubit_name()}};
    json cal;
    cal["time_unit"] = "s";
    cal["t_1q"] = model.calibration.t_1q;
    json t2q = json::object();
    for (const auto& [gate, v] : model.calibration.t_2q_by_gate) t2q[gate] = v;
    cal["t_2q"] = t2q;
    cal["t_meas"] = model.calibration.t_meas;
    cal["eps_1q"] = model.calibration.eps_1q;
    cal["eps_2q"] = model.calibration.eps_2q;
    cal["eps_meas"] = model.calibration.eps_meas;
    cal["t2"] = model.calibration.t2;
    if (model.calibration.t1) cal["t1"] = *model.calibration.t1;
    doc["calibration"] = cal;
    return doc;
}

BackendModel load_backend(const std::string& path_or_preset) {
    if (is_preset_name(path_or_preset))
        return backend_from_json(json::parse(preset_json(path_or_preset)));
    std::ifstream in(path_or_preset);
    if (!in) throw IoError("cannot open backend file '" + path_or_preset + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw CalibrationFormatError(std::string("backend file is not valid JSON: ") + e.what());
    }
    return backend_from_json(doc);
}

void store_backend(const BackendModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write backend file '" + path + "'");
    out << backend_to_json(model).dump(2) << "\n";
}

}  // namespace qcostnas
