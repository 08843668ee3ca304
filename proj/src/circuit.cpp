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

#include "qcostnas/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qcostnas {

GateClass classify(GateKind kind) {
    switch (kind) {
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rz:
        case GateKind::Sx:
        case GateKind::X:
            return GateClass::OneQubit;
        case GateKind::Cnot:
        case GateKind::Cz:
        case GateKind::Swap:
        case GateKind::Ecr:
            return GateClass::TwoQubit;
        case GateKind::Measure:
            return GateClass::Measurement;
    }
    throw InvalidArgumentError("unknown gate kind");
}

bool is_rotation(GateKind kind) {
    return kind == GateKind::Rx || kind == GateKind::Ry || kind == GateKind::Rz;
}

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::Rx: return "rx";
        case GateKind::Ry: return "ry";
        case GateKind::Rz: return "rz";
        case GateKind::Cnot: return "cnot";
        case GateKind::Cz: return "cz";
        case GateKind::Swap: return "swap";
        case GateKind::Sx: return "sx";
        case GateKind::X: return "x";
        case GateKind::Ecr: return "ecr";
        case GateKind::Measure: return "measure";
    }
    return "?";
}

std::optional<GateKind> gate_from_name(std::string_view name) {
    if (name == "rx") return GateKind::Rx;
    if (name == "ry") return GateKind::Ry;
    if (name == "rz") return GateKind::Rz;
    if (name == "cnot" || name == "cx") return GateKind::Cnot;
    if (name == "cz") return GateKind::Cz;
    if (name == "swap") return GateKind::Swap;
    if (name == "sx") return GateKind::Sx;
    if (name == "x") return GateKind::X;
    if (name == "ecr") return GateKind::Ecr;
    if (name == "measure") return GateKind::Measure;
    return std::nullopt;
}

Circuit::Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw InvalidArgumentError("circuit needs at least one qubit");
}

void Circuit::check_qubit(int q) const {
    if (q < 0 || q >= n_qubits_)
        throw InvalidArgumentError("qubit index " + std::to_string(q) + " out of range for " +
                                   std::to_string(n_qubits_) + " qubits");
}

int Circuit::add_trainable(GateKind kind, int qubit) {
    if (!is_rotation(kind)) throw InvalidArgumentError("only rotations take trainable parameters");
    check_qubit(qubit);
    const int slot = n_params_++;
    gates_.push_back({kind, {qubit, -1}, ParamBinding::trainable(slot)});
    return slot;
}

int Circuit::add_input(GateKind kind, int qubit) {
    if (!is_rotation(kind)) throw InvalidArgumentError("only rotations take data inputs");
    check_qubit(qubit);
    const int slot = n_inputs_++;
    gates_.push_back({kind, {qubit, -1}, ParamBinding::input(slot)});
    return slot;
}

void Circuit::add_fixed(GateKind kind, int qubit, double angle) {
    if (!is_rotation(kind)) throw InvalidArgumentError("only rotations take angles");
    check_qubit(qubit);
    gates_.push_back({kind, {qubit, -1}, ParamBinding::fixed(angle)});
}

void Circuit::add_one_qubit(GateKind kind, int qubit) {
    if (classify(kind) != GateClass::OneQubit || is_rotation(kind))
        throw InvalidArgumentError("expected a non-rotation one-qubit gate");
    check_qubit(qubit);
    gates_.push_back({kind, {qubit, -1}, {}});
}

void Circuit::add_two_qubit(GateKind kind, int a, int b) {
    if (classify(kind) != GateClass::TwoQubit)
        throw InvalidArgumentError("expected a two-qubit gate kind");
    check_qubit(a);
    check_qubit(b);
    if (a == b) throw InvalidArgumentError("two-qubit gate needs distinct qubits");
    gates_.push_back({kind, {a, b}, {}});
}

void Circuit::add_measure(int qubit) {
    check_qubit(qubit);
    gates_.push_back({GateKind::Measure, {qubit, -1}, {}});
}

void Circuit::add_raw(const Gate& gate) {
    check_qubit(gate.qubits[0]);
    if (gate.arity() == 2) {
        check_qubit(gate.qubits[1]);
        if (gate.qubits[0] == gate.qubits[1])
            throw InvalidArgumentError("two-qubit gate needs distinct qubits");
    }
    if (gate.param.source == ParamBinding::Source::Trainable &&
        (gate.param.slot < 0 || gate.param.slot >= n_params_))
        throw InvalidArgumentError("trainable slot out of range");
    if (gate.param.source == ParamBinding::Source::Input &&
        (gate.param.slot < 0 || gate.param.slot >= n_inputs_))
        throw InvalidArgumentError("input slot out of range");
    if (gate.param.source != ParamBinding::Source::Fixed && !is_rotation(gate.kind))
        throw InvalidArgumentError("only rotations carry parameter bindings");
    gates_.push_back(gate);
}

Circuit Circuit::with_counts(int n_qubits, int n_params, int n_inputs) {
    Circuit c(n_qubits);
    if (n_params < 0 || n_inputs < 0) throw InvalidArgumentError("negative slot count");
    c.n_params_ = n_params;
    c.n_inputs_ = n_inputs;
    return c;
}

void Circuit::validate() const {
    std::vector<int> trainable_uses(static_cast<std::size_t>(n_params_), 0);
    std::int64_t trainable_gates = 0;
    for (const Gate& g : gates_) {
        check_qubit(g.qubits[0]);
        if (g.arity() == 2) {
            check_qubit(g.qubits[1]);
            if (g.qubits[0] == g.qubits[1])
                throw InvalidArgumentError("two-qubit gate on identical qubits");
        }
        switch (g.param.source) {
            case ParamBinding::Source::Fixed:
                break;
            case ParamBinding::Source::Trainable:
                if (!is_rotation(g.kind))
                    throw InvalidArgumentError("non-rotation gate with trainable binding");
                if (g.param.slot < 0 || g.param.slot >= n_params_)
                    throw InvalidArgumentError("trainable slot out of range");
                ++trainable_uses[static_cast<std::size_t>(g.param.slot)];
                ++trainable_gates;
                break;
            case ParamBinding::Source::Input:
                if (!is_rotation(g.kind))
                    throw InvalidArgumentError("non-rotation gate with input binding");
                if (g.param.slot < 0 || g.param.slot >= n_inputs_)
                    throw InvalidArgumentError("input slot out of range");
                break;
        }
    }
    if (trainable_gates != n_params_)
        throw InvalidArgumentError("n_params does not match the trainable gate count");
    for (int uses : trainable_uses)
        if (uses != 1) throw InvalidArgumentError("every trainable slot must bind exactly one gate");
}

std::string_view topology_name(Topology t) {
    switch (t) {
        case Topology::Linear: return "linear";
        case Topology::Circular: return "circular";
        case Topology::Full: return "full";
        case Topology::Star: return "star";
        case Topology::Grid: return "grid";
    }
    return "?";
}

std::optional<Topology> topology_from_name(std::string_view name) {
    if (name == "linear") return Topology::Linear;
    if (name == "circular") return Topology::Circular;
    if (name == "full") return Topology::Full;
    if (name == "star") return Topology::Star;
    if (name == "grid") return Topology::Grid;
    return std::nullopt;
}

std::vector<std::pair<int, int>> topology_edges(Topology topology, int n) {
    if (n < 2) throw InvalidArgumentError("topology needs at least 2 qubits");
    std::vector<std::pair<int, int>> edges;
    switch (topology) {
        case Topology::Linear:
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            break;
        case Topology::Circular:
            for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
            if (n > 2) edges.emplace_back(n - 1, 0);  // n == 2 would duplicate (0,1)
            break;
        case Topology::Full:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
            break;
        case Topology::Star:
            for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
            break;
        case Topology::Grid: {
            const int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
            const int cols = (n + rows - 1) / rows;
            for (int i = 0; i < n; ++i) {
                const int col = i % cols;
                if (col + 1 < cols && i + 1 < n) edges.emplace_back(i, i + 1);
                if (i + cols < n) edges.emplace_back(i, i + cols);
            }
            break;
        }
    }
    return edges;
}

Circuit build_ansatz(const AnsatzSpec& spec) {
    if (spec.n_qubits < kMinAnsatzQubits || spec.n_qubits > kMaxAnsatzQubits ||
        spec.depth < kMinAnsatzDepth || spec.depth > kMaxAnsatzDepth ||
        spec.rotation_kinds.empty())
        throw InvalidArgumentError("ansatz parameters outside the search space");
    for (GateKind k : spec.rotation_kinds)
        if (!is_rotation(k)) throw InvalidArgumentError("rotation kinds must be rx/ry/rz");
    if (spec.entangler != GateKind::Cnot && spec.entangler != GateKind::Cz)
        throw InvalidArgumentError("entangler must be cnot or cz");

    Circuit circuit(spec.n_qubits);
    const auto edges = topology_edges(spec.topology, spec.n_qubits);
    for (int layer = 0; layer < spec.depth; ++layer) {
        const GateKind rot = spec.rotation_kinds[static_cast<std::size_t>(layer) %
                                                 spec.rotation_kinds.size()];
        for (int q = 0; q < spec.n_qubits; ++q) circuit.add_trainable(rot, q);
        for (const auto& [a, b] : edges) circuit.add_two_qubit(spec.entangler, a, b);
    }
    for (int q = 0; q < spec.n_qubits; ++q) circuit.add_measure(q);
    return circuit;
}

Circuit angle_embedding(int n_features) {
    if (n_features < 1) throw InvalidArgumentError("angle embedding needs at least one feature");
    Circuit circuit(n_features);
    for (int q = 0; q < n_features; ++q) circuit.add_input(GateKind::Ry, q);
    return circuit;
}

Circuit compose(const Circuit& first, const Circuit& second) {
    if (first.n_qubits() != second.n_qubits())
        throw InvalidArgumentError("compose needs circuits over the same register");
    Circuit out = Circuit::with_counts(first.n_qubits(), first.n_params() + second.n_params(),
                                       first.n_inputs() + second.n_inputs());
    for (const Gate& g : first.gates()) out.add_raw(g);
    for (Gate g : second.gates()) {
        if (g.param.source == ParamBinding::Source::Trainable) g.param.slot += first.n_params();
        if (g.param.source == ParamBinding::Source::Input) g.param.slot += first.n_inputs();
        out.add_raw(g);
    }
    return out;
}

Circuit embedded_ansatz(const AnsatzSpec& spec) {
    return compose(angle_embedding(spec.n_qubits), build_ansatz(spec));
}

GateCounts gate_counts(const Circuit& circuit) {
    GateCounts counts;
    for (const Gate& g : circuit.gates()) {
        switch (classify(g.kind)) {
            case GateClass::OneQubit:
                ++counts.one_qubit;
                break;
            case GateClass::TwoQubit:
                ++counts.two_qubit;
                ++counts.two_qubit_by_kind[g.kind];
                break;
            case GateClass::Measurement:
                ++counts.measure;
                break;
        }
    }
    return counts;
}

Circuit random_logical_circuit(int n_qubits, int depth, Rng& rng) {
    if (n_qubits < 2) throw InvalidArgumentError("random circuit needs at least 2 qubits");
    if (depth < 1) throw InvalidArgumentError("random circuit needs depth >= 1");
    static constexpr GateKind kRotations[] = {GateKind::Rx, GateKind::Ry, GateKind::Rz};
    const double two_pi = 6.283185307179586476925286766559;
    Circuit circuit(n_qubits);
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < n_qubits; ++q) {
            const GateKind rot = kRotations[rng.uniform_int(0, 2)];
            circuit.add_fixed(rot, q, rng.uniform(0.0, two_pi));
        }
        const int a = static_cast<int>(rng.uniform_int(0, n_qubits - 1));
        int b = static_cast<int>(rng.uniform_int(0, n_qubits - 2));
        if (b >= a) ++b;
        circuit.add_two_qubit(rng.bernoulli(0.5) ? GateKind::Cnot : GateKind::Cz, a, b);
    }
    for (int q = 0; q < n_qubits; ++q) circuit.add_measure(q);
    return circuit;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string binding_text(const ParamBinding& b) {
    switch (b.source) {
        case ParamBinding::Source::Fixed:
            return format_double(b.offset);
        case ParamBinding::Source::Trainable:
        case ParamBinding::Source::Input: {
            std::string s = (b.source == ParamBinding::Source::Trainable ? "p" : "x") +
                            std::to_string(b.slot);
            if (b.scale != 1.0) s += "*" + format_double(b.scale);
            if (b.offset != 0.0) s += "+" + format_double(b.offset);
            return s;
        }
    }
    return {};
}

double parse_double(std::string_view s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgumentError("bad number '" + std::string(s) + "' in " + context);
    }
}

/// Parses `p3`, `x0*-1+3.14`, or a float literal.
ParamBinding parse_binding(std::string_view token, const std::string& context) {
    if (token.empty()) throw InvalidArgumentError("empty parameter field in " + context);
    if (token[0] == 'p' || token[0] == 'x') {
        const bool trainable = token[0] == 'p';
        std::string_view rest = token.substr(1);
        const std::size_t star = rest.find('*');
        const std::size_t plus = rest.find('+', star == std::string_view::npos ? 0 : star + 1);
        const std::size_t slot_end = std::min(star, plus);
        int slot = 0;
        const std::string_view slot_sv = rest.substr(0, slot_end);
        auto [p, ec] = std::from_chars(slot_sv.data(), slot_sv.data() + slot_sv.size(), slot);
        if (ec == std::errc{} && p == slot_sv.data() + slot_sv.size() && slot >= 0) {
            double scale = 1.0, offset = 0.0;
            if (star != std::string_view::npos) {
                const std::size_t scale_end = plus == std::string_view::npos ? rest.size() : plus;
                scale = parse_double(rest.substr(star + 1, scale_end - star - 1), context);
            }
            if (plus != std::string_view::npos)
                offset = parse_double(rest.substr(plus + 1), context);
            return trainable ? ParamBinding::trainable(slot, scale, offset)
                             : ParamBinding::input(slot, scale, offset);
        }
        // fall through: tokens like "x" alone are not bindings here
    }
    return ParamBinding::fixed(parse_double(token, context));
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

std::string to_text(const Circuit& circuit) {
    std::string out = "circuit " + std::to_string(circuit.n_qubits()) + "\n";
    for (const Gate& g : circuit.gates()) {
        out += gate_name(g.kind);
        out += ' ';
        out += std::to_string(g.qubits[0]);
        if (g.arity() == 2) {
            out += ' ';
            out += std::to_string(g.qubits[1]);
        }
        if (is_rotation(g.kind)) {
            out += ' ';
            out += binding_text(g.param);
        }
        out += '\n';
    }
    return out;
}

Circuit from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<Circuit> circuit;
    std::vector<Gate> pending;
    int max_param = -1, max_input = -1, n_qubits = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        const std::string context = "line " + std::to_string(line_no);
        if (tokens[0] == "circuit") {
            if (n_qubits != 0) throw InvalidArgumentError("duplicate circuit header, " + context);
            if (tokens.size() != 2) throw InvalidArgumentError("bad circuit header, " + context);
            n_qubits = static_cast<int>(parse_double(tokens[1], context));
            if (n_qubits < 1) throw InvalidArgumentError("bad qubit count, " + context);
            continue;
        }
        if (n_qubits == 0) throw InvalidArgumentError("gate before circuit header, " + context);
        const auto kind = gate_from_name(tokens[0]);
        if (!kind) throw InvalidArgumentError("unknown gate '" + tokens[0] + "', " + context);
        Gate g;
        g.kind = *kind;
        const std::size_t arity = classify(*kind) == GateClass::TwoQubit ? 2 : 1;
        const bool wants_angle = is_rotation(*kind);
        if (tokens.size() != 1 + arity + (wants_angle ? 1 : 0))
            throw InvalidArgumentError("wrong field count for " + tokens[0] + ", " + context);
        g.qubits[0] = static_cast<int>(parse_double(tokens[1], context));
        if (arity == 2) g.qubits[1] = static_cast<int>(parse_double(tokens[2], context));
        if (wants_angle) {
            g.param = parse_binding(tokens[1 + arity], context);
            if (g.param.source == ParamBinding::Source::Trainable)
                max_param = std::max(max_param, g.param.slot);
            if (g.param.source == ParamBinding::Source::Input)
                max_input = std::max(max_input, g.param.slot);
        }
        pending.push_back(g);
    }
    if (n_qubits == 0) throw InvalidArgumentError("missing circuit header");
    circuit = Circuit::with_counts(n_qubits, max_param + 1, max_input + 1);
    for (const Gate& g : pending) circuit->add_raw(g);
    circuit->validate();
    return *circuit;
}

Circuit from_qasm(const std::string& text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
        }
        if (i < text.size()) cleaned += text[i];
    }

    int n_qubits = 0;
    std::vector<Gate> pending;
    int max_param = -1, max_input = -1;
    std::vector<int> pending_measure_all;  // deferred `measure q -> c`

    auto parse_qubit = [&](std::string_view tok, const std::string& ctx) -> int {
        // expected: q[<idx>]
        const std::size_t open = tok.find('[');
        const std::size_t close = tok.find(']');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open)
            throw InvalidArgumentError("bad qubit reference '" + std::string(tok) + "' in " + ctx);
        int idx = 0;
        const auto sv = tok.substr(open + 1, close - open - 1);
        auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), idx);
        if (ec != std::errc{} || p != sv.data() + sv.size())
            throw InvalidArgumentError("bad qubit index in " + ctx);
        return idx;
    };

    std::size_t pos = 0;
    int stmt_no = 0;
    while (pos < cleaned.size()) {
        const std::size_t semi = cleaned.find(';', pos);
        if (semi == std::string::npos) break;
        std::string stmt = cleaned.substr(pos, semi - pos);
        pos = semi + 1;
        ++stmt_no;
        // normalize whitespace
        std::replace(stmt.begin(), stmt.end(), '\n', ' ');
        std::replace(stmt.begin(), stmt.end(), '\t', ' ');
        const auto first = stmt.find_first_not_of(' ');
        if (first == std::string::npos) continue;
        stmt = stmt.substr(first);
        const std::string ctx = "statement " + std::to_string(stmt_no);

        if (stmt.rfind("OPENQASM", 0) == 0 || stmt.rfind("include", 0) == 0 ||
            stmt.rfind("creg", 0) == 0 || stmt.rfind("barrier", 0) == 0)
            continue;
        if (stmt.rfind("qreg", 0) == 0) {
            const std::size_t open = stmt.find('[');
            const std::size_t close = stmt.find(']');
            if (open == std::string::npos || close == std::string::npos)
                throw InvalidArgumentError("bad qreg declaration");
            n_qubits = static_cast<int>(parse_double(stmt.substr(open + 1, close - open - 1), ctx));
            continue;
        }
        if (n_qubits == 0) throw InvalidArgumentError("gate before qreg declaration, " + ctx);

        if (stmt.rfind("measure", 0) == 0) {
            std::string args = stmt.substr(7);
            const std::size_t arrow = args.find("->");
            if (arrow != std::string::npos) args.resize(arrow);
            const auto toks = split_ws(args);
            if (toks.size() != 1) throw InvalidArgumentError("bad measure statement, " + ctx);
            if (toks[0].find('[') == std::string::npos) {
                for (int q = 0; q < n_qubits; ++q)
                    pending.push_back({GateKind::Measure, {q, -1}, {}});
            } else {
                pending.push_back({GateKind::Measure, {parse_qubit(toks[0], ctx), -1}, {}});
            }
            continue;
        }

        // form: name[(arg)] q[i][, q[j]]
        std::string name = stmt;
        std::string arg;
        const std::size_t paren = stmt.find('(');
        std::string operands;
        if (paren != std::string::npos) {
            const std::size_t close = stmt.find(')', paren);
            if (close == std::string::npos) throw InvalidArgumentError("unbalanced parens, " + ctx);
            name = stmt.substr(0, paren);
            arg = stmt.substr(paren + 1, close - paren - 1);
            operands = stmt.substr(close + 1);
        } else {
            const std::size_t sp = stmt.find(' ');
            if (sp == std::string::npos) throw InvalidArgumentError("bad statement, " + ctx);
            name = stmt.substr(0, sp);
            operands = stmt.substr(sp);
        }
        name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
        arg.erase(std::remove(arg.begin(), arg.end(), ' '), arg.end());
        const auto kind = gate_from_name(name);
        if (!kind || *kind == GateKind::Measure)
            throw InvalidArgumentError("unsupported QASM gate '" + name + "', " + ctx);

        std::vector<std::string> qtoks;
        std::string cur;
        for (char c : operands) {
            if (c == ',') {
                qtoks.push_back(cur);
                cur.clear();
            } else if (c != ' ') {
                cur += c;
            }
        }
        if (!cur.empty()) qtoks.push_back(cur);

        Gate g;
        g.kind = *kind;
        const std::size_t arity = classify(*kind) == GateClass::TwoQubit ? 2u : 1u;
        if (qtoks.size() != arity)
            throw InvalidArgumentError("wrong operand count for " + name + ", " + ctx);
        g.qubits[0] = parse_qubit(qtoks[0], ctx);
        if (arity == 2) g.qubits[1] = parse_qubit(qtoks[1], ctx);
        if (is_rotation(*kind)) {
            if (arg.empty()) throw InvalidArgumentError("rotation without angle, " + ctx);
            g.param = parse_binding(arg, ctx);
            if (g.param.source == ParamBinding::Source::Trainable)
                max_param = std::max(max_param, g.param.slot);
            if (g.param.source == ParamBinding::Source::Input)
                max_input = std::max(max_input, g.param.slot);
        } else if (!arg.empty()) {
            throw InvalidArgumentError("gate " + name + " takes no argument, " + ctx);
        }
        pending.push_back(g);
    }
    if (n_qubits == 0) throw InvalidArgumentError("missing qreg declaration");
    Circuit circuit = Circuit::with_counts(n_qubits, max_param + 1, max_input + 1);
    for (const Gate& g : pending) circuit.add_raw(g);
    circuit.validate();
    return circuit;
}

}  // namespace qcostnas
