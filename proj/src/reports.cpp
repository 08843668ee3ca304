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

#include "qcostnas/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "qcostnas/qcost.hpp"

namespace qcostnas {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ValidationReport cmd_validate_scheduler(const BackendModel& backend, int n_circuits,
                                        int qubits_min, int qubits_max, int depth_min,
                                        int depth_max, std::uint64_t seed) {
    if (n_circuits < 1) throw InvalidArgumentError("need at least one circuit");
    if (qubits_min < 2 || qubits_max > backend.coupling.n_physical() ||
        qubits_min > qubits_max)
        throw InvalidArgumentError("qubit range does not fit the backend");
    ValidationReport report;
    report.backend = backend.name;
    report.seed = seed;
    Rng rng = Rng(seed).fork(0x76616c69ull);
    double gap_sum = 0.0, gap_zero_sum = 0.0;
    for (int i = 0; i < n_circuits; ++i) {
        ValidationRow row;
        row.circuit_id = i;
        row.n_qubits = static_cast<int>(rng.uniform_int(qubits_min, qubits_max));
        row.depth = static_cast<int>(rng.uniform_int(depth_min, depth_max));
        const Circuit logical = random_logical_circuit(row.n_qubits, row.depth, rng);
        const TranspiledCircuit transpiled = transpile(logical, backend);
        row.t_gate = gate_execution_time(transpiled.physical_counts, backend.calibration);
        row.makespan = asap_schedule(transpiled.physical, backend.calibration);
        row.makespan_zero_rz =
            asap_schedule(transpiled.physical, backend.calibration, {.zero_rz = true});
        row.gap = row.t_gate > 0.0 ? (row.t_gate - row.makespan) / row.t_gate : 0.0;
        row.gap_zero_rz =
            row.t_gate > 0.0 ? (row.t_gate - row.makespan_zero_rz) / row.t_gate : 0.0;
        gap_sum += row.gap;
        gap_zero_sum += row.gap_zero_rz;
        report.rows.push_back(row);
    }
    report.mean_gap = gap_sum / n_circuits;
    report.mean_gap_zero_rz = gap_zero_sum / n_circuits;
    return report;
}

std::string validation_csv(const ValidationReport& report) {
    std::string out = "# qcostnas scheduler validation v1\n";
    out += "circuit_id,n_qubits,depth,t_gate_s,makespan_s,makespan_zero_rz_s,gap,gap_zero_rz\n";
    for (const ValidationRow& row : report.rows) {
        out += std::to_string(row.circuit_id) + "," + std::to_string(row.n_qubits) + "," +
               std::to_string(row.depth) + "," + format_double(row.t_gate) + "," +
               format_double(row.makespan) + "," + format_double(row.makespan_zero_rz) + "," +
               format_double(row.gap) + "," + format_double(row.gap_zero_rz) + "\n";
    }
    return out;
}

AblationReport cmd_ablate(const ParetoArchive& archive) {
    AblationReport report;
    for (const EvaluatedGenome& eval : archive.final_front) {
        if (!eval.quantum_cost) {
            ++report.skipped_saturated;
            continue;
        }
        AblationRow row;
        row.genome = eval.key;
        row.n_qubits = eval.genome.n_qubits;
        row.depth = eval.genome.depth;
        row.topology = std::string(topology_name(eval.genome.topology));
        row.t_logical = eval.quantum_cost->t_logical;
        row.t_routing = eval.quantum_cost->t_routing;
        row.reliability_penalty = eval.quantum_cost->reliability_penalty;
        row.t_eff = eval.quantum_cost->t_eff;
        row.accuracy = eval.accuracy;
        report.rows.push_back(std::move(row));
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const AblationRow& a, const AblationRow& b) { return a.t_eff > b.t_eff; });
    return report;
}

std::string ablation_csv(const AblationReport& report) {
    std::string out = "# qcostnas quantum cost ablation v1 (per-step seconds)\n";
    out += "n_qubits,depth,topology,t_logical_s,t_routing_s,reliability_penalty_s,t_eff_s,"
           "accuracy,genome\n";
    for (const AblationRow& row : report.rows) {
        std::string genome = row.genome;
        std::replace(genome.begin(), genome.end(), ',', ';');
        out += std::to_string(row.n_qubits) + "," + std::to_string(row.depth) + "," +
               row.topology + "," + format_double(row.t_logical) + "," +
               format_double(row.t_routing) + "," + format_double(row.reliability_penalty) +
               "," + format_double(row.t_eff) + "," + format_double(row.accuracy) + ",\"" +
               genome + "\"\n";
    }
    return out;
}

namespace {

std::string genome_summary(const Genome& genome) {
    std::string rot;
    for (GateKind k : genome.rotation_kinds) {
        if (!rot.empty()) rot += "|";
        rot += std::string(gate_name(k));
    }
    std::string conv;
    for (const ConvGene& g : genome.conv) {
        if (!conv.empty()) conv += "+";
        conv += std::to_string(g.out_ch) + "k" + std::to_string(g.kernel) +
                std::string(activation_name(g.activation));
        if (g.pooling != Pooling::None) conv += std::string(pooling_name(g.pooling));
        if (g.dropout) conv += "d";
    }
    if (conv.empty()) conv = "-";
    return std::to_string(genome.n_qubits) + "q" + std::to_string(genome.depth) + "L," + rot +
           "," + std::string(gate_name(genome.entangler)) + "," +
           std::string(topology_name(genome.topology)) + "," + conv;
}

std::string eval_csv_row(const EvaluatedGenome& eval, int generation, int member,
                         int rank, double crowding, bool final_front) {
    return std::to_string(generation) + "," + std::to_string(member) + "," +
           genome_summary(eval.genome) + "," + format_double(eval.accuracy) + "," +
           format_double(eval.objectives.error) + "," +
           format_double(eval.objectives.t_quantum_total) + "," +
           format_double(eval.objectives.t_classical_total) + "," +
           format_double(eval.objectives.params_total) + "," + std::to_string(eval.n_steps) +
           "," + std::to_string(rank) + "," + format_double(crowding) + "," +
           (eval.quantum_cost ? format_double(eval.quantum_cost->t_eff) : "nan") + "," +
           (eval.quantum_cost ? format_double(eval.quantum_cost->t_routing) : "nan") + "," +
           (eval.diverged ? "1" : "0") + "," + (eval.reliability_saturated ? "1" : "0") + "," +
           (final_front ? "1" : "0") + "\n";
}

constexpr const char* kGenerationsHeader =
    "generation,member,n_qubits_depth,rotations,entangler,topology,conv,accuracy,error,"
    "t_quantum_total_s,t_classical_total_s,params_total,n_steps,rank,crowding,t_eff_s,"
    "t_routing_s,diverged,saturated,final_front\n";

std::set<std::string> front_keys(const ParetoArchive& archive) {
    std::set<std::string> keys;
    for (const EvaluatedGenome& eval : archive.final_front) keys.insert(eval.key);
    return keys;
}

}  // namespace

std::string generations_csv(const ParetoArchive& archive) {
    const auto front = front_keys(archive);
    std::string out = "# qcostnas pareto generations v1\n";
    out += kGenerationsHeader;
    for (std::size_t g = 0; g < archive.generations.size(); ++g) {
        const GenerationRecord& record = archive.generations[g];
        for (std::size_t m = 0; m < record.population.size(); ++m) {
            const EvaluatedGenome& eval = record.population[m];
            out += eval_csv_row(eval, static_cast<int>(g), static_cast<int>(m),
                                record.ranks[m], record.crowding[m], front.contains(eval.key));
        }
    }
    return out;
}

std::string final_front_csv(const ParetoArchive& archive) {
    std::string out = "# qcostnas pareto final front v1\n";
    out += kGenerationsHeader;
    for (std::size_t m = 0; m < archive.final_front.size(); ++m) {
        const EvaluatedGenome& eval = archive.final_front[m];
        out += eval_csv_row(eval, eval.first_generation, static_cast<int>(m), 1, 0.0, true);
    }
    return out;
}

std::vector<std::array<double, 4>> front_objectives(const GenerationRecord& record) {
    std::vector<std::array<double, 4>> out;
    for (std::size_t i = 0; i < record.population.size(); ++i)
        if (record.ranks[i] == 1) out.push_back(record.population[i].objectives.as_array());
    return out;
}

std::vector<std::array<double, 4>> front_objectives(const std::vector<EvaluatedGenome>& front) {
    std::vector<std::array<double, 4>> out;
    out.reserve(front.size());
    for (const EvaluatedGenome& eval : front) out.push_back(eval.objectives.as_array());
    return out;
}

namespace {

double hv_recursive(std::vector<std::array<double, 4>> points,
                    const std::array<double, 4>& reference, int dim) {
    if (points.empty()) return 0.0;
    if (dim == 0) {
        double lo = reference[0];
        for (const auto& p : points) lo = std::min(lo, p[0]);
        return reference[0] - lo;
    }
    // slice along `dim`: sort ascending, sweep slabs
    std::sort(points.begin(), points.end(),
              [dim](const auto& a, const auto& b) { return a[static_cast<std::size_t>(dim)] <
                                                           b[static_cast<std::size_t>(dim)]; });
    double volume = 0.0;
    std::vector<std::array<double, 4>> active;
    for (std::size_t i = 0; i < points.size(); ++i) {
        active.push_back(points[i]);
        // skip duplicates of the slicing coordinate
        if (i + 1 < points.size() &&
            points[i + 1][static_cast<std::size_t>(dim)] ==
                points[i][static_cast<std::size_t>(dim)])
            continue;
        const double lo = points[i][static_cast<std::size_t>(dim)];
        const double hi = i + 1 < points.size()
                              ? points[i + 1][static_cast<std::size_t>(dim)]
                              : reference[static_cast<std::size_t>(dim)];
        const double width = hi - lo;
        if (width > 0.0) volume += width * hv_recursive(active, reference, dim - 1);
    }
    return volume;
}

}  // namespace

double hypervolume(std::span<const std::array<double, 4>> points,
                   const std::array<double, 4>& reference) {
    std::vector<std::array<double, 4>> inside;
    inside.reserve(points.size());
    for (const auto& p : points) {
        for (int d = 0; d < 4; ++d)
            if (p[static_cast<std::size_t>(d)] > reference[static_cast<std::size_t>(d)])
                throw InvalidArgumentError("point lies outside the reference box");
        inside.push_back(p);
    }
    if (inside.empty()) return 0.0;
    return hv_recursive(std::move(inside), reference, 3);
}

std::array<double, 4> hypervolume_reference(std::span<const std::array<double, 4>> a,
                                            std::span<const std::array<double, 4>> b) {
    std::array<double, 4> ref = {0.0, 0.0, 0.0, 0.0};
    const auto fold = [&ref](std::span<const std::array<double, 4>> pts) {
        for (const auto& p : pts)
            for (int d = 0; d < 4; ++d)
                ref[static_cast<std::size_t>(d)] =
                    std::max(ref[static_cast<std::size_t>(d)], p[static_cast<std::size_t>(d)]);
    };
    fold(a);
    fold(b);
    for (double& v : ref) v = v * 1.1 + 1e-9;
    return ref;
}

namespace {

struct SvgScale {
    double lo = 0.0, hi = 1.0;
    double map(double v, double pixel_lo, double pixel_hi) const {
        if (hi <= lo) return 0.5 * (pixel_lo + pixel_hi);
        return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

const char* kAxisNames[4] = {"1 - accuracy", "T_quantum_total [s]", "T_classical_total [s]",
                             "Params_total"};

std::string svg_color(double fraction) {
    // purple (early generation) to yellow
    const int r = static_cast<int>(90 + fraction * (253 - 90));
    const int g = static_cast<int>(24 + fraction * (231 - 24));
    const int b = static_cast<int>(154 - fraction * (154 - 37));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string pareto_svg(const ParetoArchive& archive, int axis_x, int axis_y) {
    if (axis_x < 0 || axis_x > 3 || axis_y < 0 || axis_y > 3 || axis_x == axis_y)
        throw InvalidArgumentError("axes must be two distinct objective indices in [0, 3]");
    const double width = 640, height = 480, margin = 60;
    SvgScale sx, sy;
    bool first = true;
    for (const auto& record : archive.generations) {
        for (const auto& eval : record.population) {
            const auto obj = eval.objectives.as_array();
            const double x = obj[static_cast<std::size_t>(axis_x)];
            const double y = obj[static_cast<std::size_t>(axis_y)];
            if (first) {
                sx.lo = sx.hi = x;
                sy.lo = sy.hi = y;
                first = false;
            }
            sx.lo = std::min(sx.lo, x);
            sx.hi = std::max(sx.hi, x);
            sy.lo = std::min(sy.lo, y);
            sy.hi = std::max(sy.hi, y);
        }
    }
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
                      "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<line x1=\"60\" y1=\"420\" x2=\"600\" y2=\"420\" stroke=\"black\"/>\n";
    svg += "<line x1=\"60\" y1=\"420\" x2=\"60\" y2=\"40\" stroke=\"black\"/>\n";
    svg += "<text x=\"320\" y=\"460\" text-anchor=\"middle\" font-size=\"13\">" +
           std::string(kAxisNames[axis_x]) + "</text>\n";
    svg += "<text x=\"18\" y=\"230\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 18 230)\">" +
           std::string(kAxisNames[axis_y]) + "</text>\n";
    svg += "<text x=\"60\" y=\"436\" font-size=\"10\">" + format_double(sx.lo) + "</text>\n";
    svg += "<text x=\"600\" y=\"436\" text-anchor=\"end\" font-size=\"10\">" +
           format_double(sx.hi) + "</text>\n";
    svg += "<text x=\"56\" y=\"420\" text-anchor=\"end\" font-size=\"10\">" +
           format_double(sy.lo) + "</text>\n";
    svg += "<text x=\"56\" y=\"44\" text-anchor=\"end\" font-size=\"10\">" +
           format_double(sy.hi) + "</text>\n";

    const double denom =
        archive.generations.size() > 1 ? static_cast<double>(archive.generations.size() - 1) : 1.0;
    for (std::size_t g = 0; g < archive.generations.size(); ++g) {
        const std::string color = svg_color(static_cast<double>(g) / denom);
        for (const auto& eval : archive.generations[g].population) {
            const auto obj = eval.objectives.as_array();
            const double px = sx.map(obj[static_cast<std::size_t>(axis_x)], margin, width - 40);
            const double py =
                sy.map(obj[static_cast<std::size_t>(axis_y)], height - 60, 40);
            svg += "<circle cx=\"" + format_double(px) + "\" cy=\"" + format_double(py) +
                   "\" r=\"4\" fill=\"" + color + "\" fill-opacity=\"0.8\"/>\n";
        }
    }
    // red stars for the final front
    for (const auto& eval : archive.final_front) {
        const auto obj = eval.objectives.as_array();
        const double px = sx.map(obj[static_cast<std::size_t>(axis_x)], margin, width - 40);
        const double py = sy.map(obj[static_cast<std::size_t>(axis_y)], height - 60, 40);
        svg += "<path d=\"M " + format_double(px) + " " + format_double(py - 7) +
               " L " + format_double(px + 2.2) + " " + format_double(py - 2.2) + " L " +
               format_double(px + 7) + " " + format_double(py - 2.2) + " L " +
               format_double(px + 3.4) + " " + format_double(py + 1.6) + " L " +
               format_double(px + 4.6) + " " + format_double(py + 6.6) + " L " +
               format_double(px) + " " + format_double(py + 3.4) + " L " +
               format_double(px - 4.6) + " " + format_double(py + 6.6) + " L " +
               format_double(px - 3.4) + " " + format_double(py + 1.6) + " L " +
               format_double(px - 7) + " " + format_double(py - 2.2) + " L " +
               format_double(px - 2.2) + " " + format_double(py - 2.2) +
               " Z\" fill=\"red\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

ExportPaths cmd_export_pareto(const ParetoArchive& archive, const std::string& out_dir,
                              const ExportOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    ExportPaths paths;
    const auto write = [&paths](const fs::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write '" + path.string() + "'");
        out << content;
        paths.files.push_back(path.string());
    };
    if (options.csv) {
        write(fs::path(out_dir) / "generations.csv", generations_csv(archive));
        write(fs::path(out_dir) / "final_front.csv", final_front_csv(archive));
    }
    if (options.json)
        write(fs::path(out_dir) / "archive.json", archive_to_json(archive).dump(2) + "\n");
    if (options.svg) {
        const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        const char* names[] = {"error_vs_tquantum.svg",   "error_vs_tclassical.svg",
                               "error_vs_params.svg",     "tquantum_vs_tclassical.svg",
                               "tquantum_vs_params.svg",  "tclassical_vs_params.svg"};
        for (int i = 0; i < 6; ++i)
            write(fs::path(out_dir) / names[i],
                  pareto_svg(archive, pairs[i].first, pairs[i].second));
    }
    return paths;
}

}  // namespace qcostnas
