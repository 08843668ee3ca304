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

// qcostnas command line. Exit codes: 0 success, 2 usage, 3 calibration
// format, 4 invalid backend, 5 unsupported gate, 6 invalid argument or
// architecture, 7 simulator capacity, 8 reliability saturated, 9 I/O,
// 1 anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qcostnas/backend.hpp"
#include "qcostnas/ccost.hpp"
#include "qcostnas/circuit.hpp"
#include "qcostnas/hybrid.hpp"
#include "qcostnas/nas.hpp"
#include "qcostnas/qcost.hpp"
#include "qcostnas/reports.hpp"
#include "qcostnas/transpiler.hpp"

namespace {

using namespace qcostnas;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::optional<std::string>& path, const std::string& content) {
    if (!path || path->empty() || *path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + *path + "'");
    out << content;
}

Circuit load_circuit(const std::string& path) {
    const std::string text = read_file(path);
    if (path.ends_with(".qasm") || text.find("qreg") != std::string::npos)
        return from_qasm(text);
    return from_text(text);
}

json archive_from_file(const std::string& path) { return json::parse(read_file(path)); }

struct GlobalOptions {
    std::string backend = "fake_linear7";
    std::uint64_t seed = 1;
    std::string out;
};

int run(int argc, char** argv) {
    CLI::App app{"Hardware-calibrated time-based cost models and NSGA-II architecture search "
                 "for hybrid quantum-classical networks"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags remain valid after the subcommand name
    GlobalOptions global;
    app.add_option("--backend", global.backend,
                   "Backend preset name or calibration JSON path")
        ->capture_default_str();
    app.add_option("--seed", global.seed, "Global random seed")->capture_default_str();
    app.add_option("--out", global.out, "Output file or directory (default: stdout)");

    // estimate
    auto* estimate = app.add_subcommand(
        "estimate", "Transpile a circuit and print the full quantum cost breakdown");
    std::string est_circuit;
    std::int64_t est_params = -1, est_steps = 1;
    estimate->add_option("--circuit", est_circuit, "Circuit file (text or QASM subset)")
        ->required();
    estimate->add_option("--params", est_params,
                         "Trainable parameter count (default: the circuit's own)");
    estimate->add_option("--steps", est_steps, "Optimizer steps to scale to")
        ->capture_default_str();

    // transpile
    auto* transpile_cmd =
        app.add_subcommand("transpile", "Map a circuit to a backend and report counts");
    std::string tr_in, tr_report = "counts";
    transpile_cmd->add_option("--in", tr_in, "Circuit file")->required();
    transpile_cmd->add_option("--report", tr_report, "counts|schedule")
        ->check(CLI::IsMember({"counts", "schedule"}))
        ->capture_default_str();

    // calibrate-classical
    auto* calibrate = app.add_subcommand(
        "calibrate-classical", "Measure device throughput from the reference CNN");
    std::string cal_reference = "fixed-cnn";
    int cal_steps = 10;
    calibrate->add_option("--reference", cal_reference, "Reference model (fixed-cnn)")
        ->check(CLI::IsMember({"fixed-cnn"}))
        ->capture_default_str();
    calibrate->add_option("--steps", cal_steps, "Timed training steps")->capture_default_str();

    // train-one
    auto* train_one =
        app.add_subcommand("train-one", "Train and cost a single genome for inspection");
    std::string to_genome, to_config;
    train_one->add_option("--genome", to_genome, "Genome JSON file")->required();
    train_one->add_option("--config", to_config, "Search config JSON (defaults when absent)");

    // search
    auto* search = app.add_subcommand("search", "Run the NSGA-II architecture search");
    std::string search_config_path;
    search->add_option("--config", search_config_path, "Search config JSON")->required();

    // validate-scheduler
    auto* validate = app.add_subcommand(
        "validate-scheduler", "Compare analytical gate time against the ASAP scheduler");
    int val_circuits = 100, val_qmin = 2, val_qmax = 5, val_dmin = 50, val_dmax = 600;
    validate->add_option("--circuits", val_circuits, "Number of random circuits")
        ->capture_default_str();
    validate->add_option("--qubits-min", val_qmin, "")->capture_default_str();
    validate->add_option("--qubits-max", val_qmax, "")->capture_default_str();
    validate->add_option("--depth-min", val_dmin, "")->capture_default_str();
    validate->add_option("--depth-max", val_dmax, "")->capture_default_str();

    // ablate
    auto* ablate = app.add_subcommand(
        "ablate", "Decompose per-step quantum cost of a search archive's final front");
    std::string ab_archive;
    ablate->add_option("--archive", ab_archive, "archive.json from a search run")->required();

    // export
    auto* export_cmd = app.add_subcommand("export", "Export archive CSV/JSON/SVG");
    std::string ex_archive, ex_format = "all";
    export_cmd->add_option("--archive", ex_archive, "archive.json from a search run")
        ->required();
    export_cmd->add_option("--format", ex_format, "csv|json|svg|all")
        ->check(CLI::IsMember({"csv", "json", "svg", "all"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    const std::optional<std::string> out =
        global.out.empty() ? std::nullopt : std::optional<std::string>(global.out);

    if (estimate->parsed()) {
        const BackendModel backend = load_backend(global.backend);
        const Circuit circuit = load_circuit(est_circuit);
        const TranspiledCircuit transpiled = qcostnas::transpile(circuit, backend);
        const std::int64_t n_params = est_params >= 0 ? est_params : circuit.n_params();
        const QuantumCostBreakdown breakdown =
            quantum_training_cost(transpiled, backend.calibration, {n_params, est_steps});
        json doc = to_json(breakdown);
        doc["backend"] = backend.name;
        doc["n_params"] = n_params;
        doc["n_steps"] = est_steps;
        doc["swap_count"] = transpiled.swap_count;
        write_output(out, doc.dump(2) + "\n");
        return 0;
    }
    if (transpile_cmd->parsed()) {
        const BackendModel backend = load_backend(global.backend);
        const Circuit circuit = load_circuit(tr_in);
        const TranspiledCircuit transpiled = qcostnas::transpile(circuit, backend);
        const auto counts_json = [](const GateCounts& counts) {
            json by_kind = json::object();
            for (const auto& [kind, n] : counts.two_qubit_by_kind)
                by_kind[std::string(gate_name(kind))] = n;
            return json{{"one_qubit", counts.one_qubit},
                        {"two_qubit", counts.two_qubit},
                        {"measure", counts.measure},
                        {"two_qubit_by_kind", by_kind}};
        };
        json doc{{"backend", backend.name},
                 {"logical_counts", counts_json(transpiled.logical_counts)},
                 {"physical_counts", counts_json(transpiled.physical_counts)},
                 {"swap_count", transpiled.swap_count},
                 {"layout", transpiled.layout}};
        if (tr_report == "schedule") {
            doc["makespan_s"] = asap_schedule(transpiled.physical, backend.calibration);
            doc["makespan_zero_rz_s"] =
                asap_schedule(transpiled.physical, backend.calibration, {.zero_rz = true});
            doc["t_gate_s"] =
                gate_execution_time(transpiled.physical_counts, backend.calibration);
        }
        write_output(out, doc.dump(2) + "\n");
        return 0;
    }
    if (calibrate->parsed()) {
        const double phi = measure_reference_throughput(cal_steps);
        const json doc{{"schema_version", 1},
                       {"reference", cal_reference},
                       {"timed_steps", cal_steps},
                       {"phi_device", phi}};
        write_output(out, doc.dump(2) + "\n");
        return 0;
    }
    if (train_one->parsed()) {
        SearchConfig config;
        if (!to_config.empty()) config = search_config_from_json(json::parse(read_file(to_config)));
        if (app.count("--backend")) config.backend = global.backend;
        if (app.count("--seed")) config.seed = global.seed;
        const Genome genome = genome_from_json(json::parse(read_file(to_genome)));
        if (!genome.conv.empty()) config.mode = SearchMode::Variable;
        const BackendModel backend = load_backend(config.backend);
        const Dataset dataset = make_dataset(config.dataset_classes,
                                             config.dataset_samples_per_class,
                                             config.dataset_seed);
        const double phi =
            config.phi_device ? *config.phi_device : measure_reference_throughput();
        const EvaluatedGenome eval = evaluate_genome(genome, config, backend, dataset, phi);
        write_output(out, evaluated_to_json(eval).dump(2) + "\n");
        return 0;
    }
    if (search->parsed()) {
        SearchConfig config = search_config_from_json(json::parse(read_file(search_config_path)));
        if (app.count("--backend")) config.backend = global.backend;
        if (app.count("--seed")) config.seed = global.seed;
        const ParetoArchive archive = run_search(config);
        const std::string dir = out.value_or("search_out");
        cmd_export_pareto(archive, dir, {.csv = true, .json = true, .svg = true});

        const auto gen0 = front_objectives(archive.generations.front());
        const auto final_front = front_objectives(archive.final_front);
        const auto ref = hypervolume_reference(gen0, final_front);
        json summary{{"mode", std::string(search_mode_name(config.mode))},
                     {"backend", config.backend},
                     {"generations", archive.generations.size()},
                     {"evaluations_archived", archive.generations.size() *
                                                  archive.generations.front().population.size()},
                     {"final_front_size", archive.final_front.size()},
                     {"hypervolume_generation0", hypervolume(gen0, ref)},
                     {"hypervolume_final", hypervolume(final_front, ref)},
                     {"out_dir", dir}};
        std::cout << summary.dump(2) << "\n";
        return 0;
    }
    if (validate->parsed()) {
        const BackendModel backend = load_backend(global.backend);
        const ValidationReport report = cmd_validate_scheduler(
            backend, val_circuits, val_qmin, val_qmax, val_dmin, val_dmax, global.seed);
        write_output(out, validation_csv(report));
        std::cerr << "mean gap: " << format_double(report.mean_gap)
                  << "  mean gap (zero rz): " << format_double(report.mean_gap_zero_rz) << "\n";
        return 0;
    }
    if (ablate->parsed()) {
        const ParetoArchive archive = archive_from_json(archive_from_file(ab_archive));
        const AblationReport report = cmd_ablate(archive);
        write_output(out, ablation_csv(report));
        if (report.skipped_saturated > 0)
            std::cerr << report.skipped_saturated
                      << " saturated architecture(s) skipped (no finite breakdown)\n";
        return 0;
    }
    if (export_cmd->parsed()) {
        const ParetoArchive archive = archive_from_json(archive_from_file(ex_archive));
        ExportOptions options{false, false, false};
        if (ex_format == "csv" || ex_format == "all") options.csv = true;
        if (ex_format == "json" || ex_format == "all") options.json = true;
        if (ex_format == "svg" || ex_format == "all") options.svg = true;
        const std::string dir = out.value_or("export_out");
        const ExportPaths paths = cmd_export_pareto(archive, dir, options);
        for (const std::string& file : paths.files) std::cout << file << "\n";
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CalibrationFormatError& e) {
        std::cerr << "calibration format error: " << e.what() << "\n";
        return 3;
    } catch (const InvalidBackendError& e) {
        std::cerr << "invalid backend: " << e.what() << "\n";
        return 4;
    } catch (const UnsupportedGateError& e) {
        std::cerr << "unsupported gate: " << e.what() << "\n";
        return 5;
    } catch (const UnsupportedGradientError& e) {
        std::cerr << "unsupported gradient: " << e.what() << "\n";
        return 5;
    } catch (const InvalidArchitectureError& e) {
        std::cerr << "invalid architecture: " << e.what() << "\n";
        return 6;
    } catch (const InvalidArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 6;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 7;
    } catch (const ReliabilitySaturatedError& e) {
        std::cerr << "reliability saturated: " << e.what() << "\n";
        return 8;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 9;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
