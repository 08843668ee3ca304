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

// Python bindings over the main operations. Structured values cross the
// boundary as plain dicts/lists (via JSON where a schema already exists), so
// the Python surface stays stable against C++ refactors.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "qcostnas/backend.hpp"
#include "qcostnas/ccost.hpp"
#include "qcostnas/circuit.hpp"
#include "qcostnas/hybrid.hpp"
#include "qcostnas/nas.hpp"
#include "qcostnas/qcost.hpp"
#include "qcostnas/reports.hpp"
#include "qcostnas/simkernel.hpp"
#include "qcostnas/transpiler.hpp"

namespace py = pybind11;
using namespace qcostnas;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
    switch (j.type()) {
        case json::value_t::null:
            return py::none();
        case json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float:
            return py::float_(j.get<double>());
        case json::value_t::string:
            return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case json::value_t::object: {
            py::dict out;
            for (const auto& item : j.items())
                out[py::str(item.key())] = json_to_py(item.value());
            return out;
        }
        default:
            return py::none();
    }
}

json py_to_json(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<std::int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::dict>(obj)) {
        json out = json::object();
        for (const auto& item : obj.cast<py::dict>())
            out[item.first.cast<std::string>()] = py_to_json(item.second);
        return out;
    }
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        json out = json::array();
        for (const auto& item : obj.cast<py::sequence>()) out.push_back(py_to_json(item));
        return out;
    }
    throw py::type_error("cannot convert python object to JSON");
}

GateKind parse_gate(const std::string& name) {
    const auto kind = gate_from_name(name);
    if (!kind) throw InvalidArgumentError("unknown gate '" + name + "'");
    return *kind;
}

Topology parse_topology(const std::string& name) {
    const auto topo = topology_from_name(name);
    if (!topo) throw InvalidArgumentError("unknown topology '" + name + "'");
    return *topo;
}

AnsatzSpec make_ansatz_spec(int n_qubits, int depth, const std::vector<std::string>& rotations,
                            const std::string& entangler, const std::string& topology) {
    AnsatzSpec spec;
    spec.n_qubits = n_qubits;
    spec.depth = depth;
    spec.rotation_kinds.clear();
    for (const std::string& r : rotations) spec.rotation_kinds.push_back(parse_gate(r));
    spec.entangler = parse_gate(entangler);
    spec.topology = parse_topology(topology);
    return spec;
}

py::dict counts_dict(const GateCounts& counts) {
    py::dict by_kind;
    for (const auto& [kind, n] : counts.two_qubit_by_kind)
        by_kind[py::str(std::string(gate_name(kind)))] = n;
    py::dict out;
    out["one_qubit"] = counts.one_qubit;
    out["two_qubit"] = counts.two_qubit;
    out["measure"] = counts.measure;
    out["two_qubit_by_kind"] = by_kind;
    return out;
}

py::list gradient_matrix(const GradientResult& g) {
    py::list rows;
    for (int o = 0; o < g.n_outputs; ++o) {
        py::list row;
        for (int p = 0; p < g.n_params; ++p) row.append(g.at(o, p));
        rows.append(row);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hardware-calibrated time-based cost models and NSGA-II search for hybrid "
              "quantum-classical networks";

    py::register_exception<Error>(m, "QcostnasError");

    // circuits -------------------------------------------------------------
    py::class_<Circuit>(m, "Circuit")
        .def_property_readonly("n_qubits", &Circuit::n_qubits)
        .def_property_readonly("n_params", &Circuit::n_params)
        .def_property_readonly("n_inputs", &Circuit::n_inputs)
        .def("__len__", [](const Circuit& c) { return c.gates().size(); })
        .def("to_text", [](const Circuit& c) { return to_text(c); })
        .def("__repr__", [](const Circuit& c) {
            return "<Circuit qubits=" + std::to_string(c.n_qubits()) +
                   " gates=" + std::to_string(c.gates().size()) + ">";
        });

    m.def("topology_edges",
          [](const std::string& topology, int n) { return topology_edges(parse_topology(topology), n); },
          py::arg("topology"), py::arg("n_qubits"),
          "Deterministic edge list of an entanglement topology");
    m.def("build_ansatz",
          [](int n_qubits, int depth, const std::vector<std::string>& rotations,
             const std::string& entangler, const std::string& topology) {
              return build_ansatz(make_ansatz_spec(n_qubits, depth, rotations, entangler, topology));
          },
          py::arg("n_qubits"), py::arg("depth"), py::arg("rotation_kinds") = std::vector<std::string>{"ry"},
          py::arg("entangler") = "cnot", py::arg("topology") = "linear");
    m.def("embedded_ansatz",
          [](int n_qubits, int depth, const std::vector<std::string>& rotations,
             const std::string& entangler, const std::string& topology) {
              return embedded_ansatz(
                  make_ansatz_spec(n_qubits, depth, rotations, entangler, topology));
          },
          py::arg("n_qubits"), py::arg("depth"), py::arg("rotation_kinds") = std::vector<std::string>{"ry"},
          py::arg("entangler") = "cnot", py::arg("topology") = "linear",
          "Angle embedding followed by the ansatz");
    m.def("angle_embedding", &angle_embedding, py::arg("n_features"));
    m.def("gate_counts", [](const Circuit& c) { return counts_dict(gate_counts(c)); });
    m.def("circuit_from_text", &from_text, py::arg("text"));
    m.def("circuit_from_qasm", &from_qasm, py::arg("text"));

    // backend ----------------------------------------------------------------
    py::class_<BackendModel>(m, "BackendModel")
        .def_property_readonly("name", [](const BackendModel& b) { return b.name; })
        .def_property_readonly("n_physical",
                               [](const BackendModel& b) { return b.coupling.n_physical(); })
        .def_property_readonly("edges", [](const BackendModel& b) { return b.coupling.edges(); })
        .def("to_dict", [](const BackendModel& b) { return json_to_py(backend_to_json(b)); })
        .def("__repr__", [](const BackendModel& b) {
            return "<BackendModel " + b.name + " qubits=" +
                   std::to_string(b.coupling.n_physical()) + ">";
        });
    m.def("load_backend", &load_backend, py::arg("path_or_preset"));
    m.def("preset_names", &preset_names);

    // transpiler ---------------------------------------------------------------
    m.def("transpile",
          [](const Circuit& circuit, const BackendModel& backend) {
              const TranspiledCircuit t = transpile(circuit, backend);
              py::dict out;
              out["logical_counts"] = counts_dict(t.logical_counts);
              out["physical_counts"] = counts_dict(t.physical_counts);
              out["swap_count"] = t.swap_count;
              out["layout"] = t.layout;
              out["physical"] = t.physical;
              return out;
          },
          py::arg("circuit"), py::arg("backend"));
    m.def("asap_schedule",
          [](const Circuit& circuit, const BackendModel& backend, bool zero_rz) {
              return asap_schedule(circuit, backend.calibration, {zero_rz});
          },
          py::arg("circuit"), py::arg("backend"), py::arg("zero_rz") = false,
          "Earliest-start makespan of a native circuit in seconds");

    // cost models ---------------------------------------------------------------
    m.def("quantum_training_cost",
          [](const Circuit& circuit, const BackendModel& backend, std::int64_t n_params,
             std::int64_t n_steps) {
              const TranspiledCircuit t = transpile(circuit, backend);
              const std::int64_t params = n_params >= 0 ? n_params : circuit.n_params();
              const QuantumCostBreakdown b =
                  quantum_training_cost(t, backend.calibration, {params, n_steps});
              return json_to_py(to_json(b));
          },
          py::arg("circuit"), py::arg("backend"), py::arg("n_params") = -1,
          py::arg("n_steps") = 1,
          "Transpile and run the full quantum cost model; returns the breakdown dict");
    m.def("gradient_evaluations", &gradient_evaluations, py::arg("n_params"));
    m.def("calibrate_throughput", &calibrate_throughput, py::arg("f_reference"),
          py::arg("t_measured"));
    m.def("classical_cost",
          [](double f_candidate, double phi_device, std::int64_t n_steps) {
              const ClassicalCost c = classical_cost(f_candidate, phi_device, n_steps);
              py::dict out;
              out["f_candidate"] = c.f_candidate;
              out["phi_device"] = c.phi_device;
              out["t_classical"] = c.t_classical;
              out["t_classical_total"] = c.t_classical_total;
              return out;
          },
          py::arg("f_candidate"), py::arg("phi_device"), py::arg("n_steps"));
    m.def("total_cost",
          py::overload_cast<double, double>(&total_cost), py::arg("t_classical_total"),
          py::arg("t_quantum_total"));
    m.def("measure_reference_throughput", &measure_reference_throughput,
          py::arg("timed_steps") = 10);

    // simulator -------------------------------------------------------------------
    m.def("run_statevector",
          [](const Circuit& circuit, const std::vector<double>& params,
             const std::vector<double>& inputs) {
              return run(circuit, params, inputs).amplitudes();
          },
          py::arg("circuit"), py::arg("params") = std::vector<double>{},
          py::arg("inputs") = std::vector<double>{},
          "Little-endian statevector after the circuit");
    m.def("expect_z",
          [](const Circuit& circuit, const std::vector<double>& params,
             const std::vector<double>& inputs) {
              return expect_z(run(circuit, params, inputs));
          },
          py::arg("circuit"), py::arg("params") = std::vector<double>{},
          py::arg("inputs") = std::vector<double>{});
    m.def("grad_parameter_shift",
          [](const Circuit& circuit, const std::vector<double>& params,
             const std::vector<double>& inputs) {
              return gradient_matrix(grad_parameter_shift(circuit, params, inputs));
          },
          py::arg("circuit"), py::arg("params"), py::arg("inputs") = std::vector<double>{});
    m.def("grad_adjoint",
          [](const Circuit& circuit, const std::vector<double>& params,
             const std::vector<double>& inputs) {
              return gradient_matrix(grad_adjoint(circuit, params, inputs));
          },
          py::arg("circuit"), py::arg("params"), py::arg("inputs") = std::vector<double>{});

    // nas -----------------------------------------------------------------------
    m.def("fast_nondominated_sort",
          [](const std::vector<std::array<double, 4>>& points) {
              return fast_nondominated_sort(points);
          },
          py::arg("points"));
    m.def("crowding_distance",
          [](const std::vector<std::array<double, 4>>& front) {
              return crowding_distance(front);
          },
          py::arg("front"));
    m.def("hypervolume",
          [](const std::vector<std::array<double, 4>>& points,
             const std::array<double, 4>& reference) { return hypervolume(points, reference); },
          py::arg("points"), py::arg("reference"));
    m.def("run_search",
          [](const py::dict& config) {
              const ParetoArchive archive =
                  run_search(search_config_from_json(py_to_json(config)));
              return json_to_py(archive_to_json(archive));
          },
          py::arg("config"),
          "Run the NSGA-II search from a config dict; returns the archive as a dict");
    m.def("validate_scheduler",
          [](const std::string& backend, int n_circuits, int qubits_min, int qubits_max,
             int depth_min, int depth_max, std::uint64_t seed) {
              const ValidationReport report =
                  cmd_validate_scheduler(load_backend(backend), n_circuits, qubits_min,
                                         qubits_max, depth_min, depth_max, seed);
              py::list rows;
              for (const ValidationRow& row : report.rows) {
                  py::dict r;
                  r["n_qubits"] = row.n_qubits;
                  r["depth"] = row.depth;
                  r["t_gate"] = row.t_gate;
                  r["makespan"] = row.makespan;
                  r["makespan_zero_rz"] = row.makespan_zero_rz;
                  r["gap"] = row.gap;
                  r["gap_zero_rz"] = row.gap_zero_rz;
                  rows.append(r);
              }
              py::dict out;
              out["rows"] = rows;
              out["mean_gap"] = report.mean_gap;
              out["mean_gap_zero_rz"] = report.mean_gap_zero_rz;
              return out;
          },
          py::arg("backend") = "fake_linear7", py::arg("n_circuits") = 100,
          py::arg("qubits_min") = 2, py::arg("qubits_max") = 5, py::arg("depth_min") = 50,
          py::arg("depth_max") = 600, py::arg("seed") = 1);

    m.attr("__version__") = "0.1.0";
}
