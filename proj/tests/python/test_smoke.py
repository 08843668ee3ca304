# Copyright 2026 The qcostnas authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import qcostnas as q


def test_topology_edges():
    assert q.topology_edges("linear", 4) == [(0, 1), (1, 2), (2, 3)]
    assert len(q.topology_edges("full", 4)) == 6
    assert q.topology_edges("circular", 2) == [(0, 1)]


def test_ansatz_counts():
    circuit = q.build_ansatz(4, 2, ["ry"], "cnot", "linear")
    assert circuit.n_qubits == 4
    assert circuit.n_params == 8
    counts = q.gate_counts(circuit)
    assert counts["one_qubit"] == 8
    assert counts["two_qubit"] == 6
    assert counts["measure"] == 4

    embedded = q.embedded_ansatz(4, 2)
    assert q.gate_counts(embedded)["one_qubit"] == 12
    assert embedded.n_inputs == 4


def test_circuit_text_round_trip():
    circuit = q.embedded_ansatz(3, 2, ["rx", "rz"], "cz", "star")
    parsed = q.circuit_from_text(circuit.to_text())
    assert parsed.to_text() == circuit.to_text()


def test_backend_presets_load():
    names = q.preset_names()
    assert "fake_linear7" in names
    backend = q.load_backend("fake_linear7")
    assert backend.n_physical == 7
    doc = backend.to_dict()
    assert doc["schema_version"] == 1
    assert doc["calibration"]["t_2q"]["ecr"] == pytest.approx(300e-9)


def test_transpile_counts_monotone():
    backend = q.load_backend("fake_linear7")
    circuit = q.build_ansatz(4, 1, ["ry"], "cnot", "full")
    result = q.transpile(circuit, backend)
    assert result["physical_counts"]["two_qubit"] >= result["logical_counts"]["two_qubit"]
    assert result["swap_count"] > 0
    makespan = q.asap_schedule(result["physical"], backend)
    assert 0 < makespan


def test_quantum_cost_breakdown_identity():
    backend = q.load_backend("fake_linear7")
    circuit = q.embedded_ansatz(4, 3)
    breakdown = q.quantum_training_cost(circuit, backend, n_steps=100)
    assert breakdown["n_eval"] == 2 * circuit.n_params
    per_eval = breakdown["t_quantum"] / breakdown["n_eval"]
    split = breakdown["t_logical"] + breakdown["t_routing"] + breakdown["reliability_penalty"]
    assert per_eval == pytest.approx(split, rel=1e-12)
    assert breakdown["t_quantum_total"] == pytest.approx(breakdown["t_quantum"] * 100)


def test_classical_cost_arithmetic():
    phi = q.calibrate_throughput(1e9, 0.05)
    assert phi == pytest.approx(2e10)
    cost = q.classical_cost(5e8, phi, 100)
    assert cost["t_classical"] == pytest.approx(0.025)
    assert cost["t_classical_total"] == pytest.approx(2.5)
    assert q.total_cost(2.5, 7.5) == pytest.approx(10.0)


def test_statevector_and_gradients():
    # single-qubit RY circuit written directly in the text format
    ry = q.circuit_from_text("circuit 1\nry 0 p0\nmeasure 0\n")
    theta = math.pi / 3
    state = q.run_statevector(ry, [theta])
    assert abs(state[0]) == pytest.approx(math.cos(theta / 2), rel=1e-12)
    assert q.expect_z(ry, [theta])[0] == pytest.approx(math.cos(theta), rel=1e-12)

    shift = q.grad_parameter_shift(ry, [theta])
    adjoint = q.grad_adjoint(ry, [theta])
    assert shift[0][0] == pytest.approx(-math.sin(theta), rel=1e-10)
    assert adjoint[0][0] == pytest.approx(shift[0][0], rel=1e-8)


def test_nsga_primitives():
    fronts = q.fast_nondominated_sort(
        [(1, 1, 0, 0), (1, 2, 0, 0), (2, 1, 0, 0), (2, 2, 0, 0)]
    )
    assert fronts == [[0], [1, 2], [3]]
    hv = q.hypervolume([(0.5, 0.5, 0.5, 0.5)], (1, 1, 1, 1))
    assert hv == pytest.approx(0.0625)


def test_small_search_runs():
    archive = q.run_search(
        {
            "mode": "fixed",
            "backend": "fake_linear7",
            "seed": 7,
            "generations": 1,
            "population": 2,
            "search_space": {"qubits": [2, 3], "depth": [1, 2]},
            "dataset": {"n_classes": 2, "samples_per_class": 20, "seed": 1},
            "training": {"epochs": 1},
            "phi_device": 2e10,
        }
    )
    assert len(archive["generations"]) == 1
    assert len(archive["generations"][0]["population"]) == 2
    assert archive["final_front"]
    member = archive["final_front"][0]
    assert member["objectives"]["t_quantum_total"] > 0
    assert 0 <= member["accuracy"] <= 1


def test_validate_scheduler_bound():
    report = q.validate_scheduler("fake_linear7", n_circuits=10, depth_min=50, depth_max=120)
    assert len(report["rows"]) == 10
    for row in report["rows"]:
        assert row["t_gate"] >= row["makespan"]
    assert report["mean_gap_zero_rz"] >= report["mean_gap"]


def test_errors_surface_as_python_exceptions():
    with pytest.raises(Exception) as exc_info:
        q.load_backend("definitely_not_a_backend.json")
    assert "cannot open" in str(exc_info.value)
    with pytest.raises(Exception):
        q.topology_edges("linear", 1)
