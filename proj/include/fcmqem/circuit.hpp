// Copyright 2026 The fcmqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fcmqem/error.hpp"
#include "fcmqem/register.hpp"

namespace fcmqem {

using Complex = std::complex<double>;

enum class GateKind { rxy, cz, identity };

/// One gate application. Targets are qubit positions in the owning register.
struct Gate {
    GateKind kind = GateKind::identity;
    double theta = 0.0;  // rotation angle, radians
    double phi = 0.0;    // rotation-axis phase, radians
    std::vector<std::size_t> targets;

    static Gate rxy(std::size_t qubit, double theta, double phi) {
        return Gate{GateKind::rxy, theta, phi, {qubit}};
    }
    static Gate cz(std::size_t a, std::size_t b) {
        return Gate{GateKind::cz, 0.0, 0.0, {a, b}};
    }
    static Gate identity(std::size_t qubit) {
        return Gate{GateKind::identity, 0.0, 0.0, {qubit}};
    }

    void validate(std::size_t n_qubits) const {
        std::size_t arity = kind == GateKind::cz ? 2 : 1;
        if (targets.size() != arity) {
            throw invalid_input(kind == GateKind::cz ? "cz takes exactly 2 targets" : "single-qubit gate takes exactly 1 target");
        }
        for (std::size_t q : targets) {
            if (q >= n_qubits) {
                throw invalid_input("gate target out of range");
            }
        }
        if (arity == 2 && targets[0] == targets[1]) {
            throw invalid_input("gate targets the same qubit twice");
        }
    }
};

/// 2x2 matrix in row-major order.
using Unitary2 = std::array<Complex, 4>;

/// R_xy(theta, phi) = [[cos(theta/2), -i sin(theta/2) e^{-i phi}],
///                     [-i sin(theta/2) e^{i phi}, cos(theta/2)]]
inline Unitary2 rxy_matrix(double theta, double phi) {
    const Complex i(0.0, 1.0);
    double c = std::cos(theta / 2.0);
    double s = std::sin(theta / 2.0);
    return {Complex(c, 0.0), -i * s * std::exp(-i * phi), -i * s * std::exp(i * phi), Complex(c, 0.0)};
}

// Named rotations used by the benchmark circuits.
inline Gate x180(std::size_t q) {
    return Gate::rxy(q, std::numbers::pi, 0.0);
}
inline Gate x90(std::size_t q) {
    return Gate::rxy(q, std::numbers::pi / 2.0, 0.0);
}
inline Gate x45(std::size_t q) {
    return Gate::rxy(q, std::numbers::pi / 4.0, 0.0);
}
inline Gate y90(std::size_t q) {
    return Gate::rxy(q, std::numbers::pi / 2.0, std::numbers::pi / 2.0);
}

/// Hadamard up to a global phase: Y90 followed by X180.
inline std::vector<Gate> compose_hadamard(std::size_t target) {
    return {y90(target), x180(target)};
}

/// CNOT up to a global phase: H(target), CZ, H(target).
inline std::vector<Gate> compose_cnot(std::size_t control, std::size_t target) {
    if (control == target) {
        throw invalid_input("cnot control and target must differ");
    }
    std::vector<Gate> out = compose_hadamard(target);
    out.push_back(Gate::cz(control, target));
    for (auto &g : compose_hadamard(target)) {
        out.push_back(std::move(g));
    }
    return out;
}

class Circuit {
   public:
    Circuit(RegisterSpec reg, std::string name) : reg_(std::move(reg)), name_(std::move(name)) {
    }

    Circuit &add(Gate gate) {
        gate.validate(reg_.n_qubits());
        gates_.push_back(std::move(gate));
        return *this;
    }

    Circuit &add(const std::vector<Gate> &gates) {
        for (const auto &g : gates) {
            add(g);
        }
        return *this;
    }

    const RegisterSpec &register_spec() const {
        return reg_;
    }
    const std::vector<Gate> &gates() const {
        return gates_;
    }
    const std::string &name() const {
        return name_;
    }

   private:
    RegisterSpec reg_;
    std::string name_;
    std::vector<Gate> gates_;
};

class Statevector {
   public:
    static Statevector basis(std::size_t n_qubits, std::size_t index) {
        Statevector s;
        s.n_qubits_ = n_qubits;
        s.amplitudes_.assign(std::size_t{1} << n_qubits, Complex(0.0, 0.0));
        if (index >= s.amplitudes_.size()) {
            throw invalid_input("basis index out of range");
        }
        s.amplitudes_[index] = 1.0;
        return s;
    }

    std::size_t n_qubits() const {
        return n_qubits_;
    }
    const std::vector<Complex> &amplitudes() const {
        return amplitudes_;
    }
    std::vector<Complex> &amplitudes() {
        return amplitudes_;
    }

    double norm_squared() const {
        double total = 0.0;
        for (const auto &a : amplitudes_) {
            total += std::norm(a);
        }
        return total;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amplitudes_.size());
        for (std::size_t k = 0; k < p.size(); k++) {
            p[k] = std::norm(amplitudes_[k]);
        }
        return p;
    }

   private:
    std::size_t n_qubits_ = 0;
    std::vector<Complex> amplitudes_;
};

inline Statevector apply_gate(Statevector state, const Gate &gate) {
    std::size_t n = state.n_qubits();
    gate.validate(n);
    auto &amps = state.amplitudes();
    switch (gate.kind) {
        case GateKind::identity:
            break;
        case GateKind::rxy: {
            Unitary2 u = rxy_matrix(gate.theta, gate.phi);
            std::size_t mask = std::size_t{1} << (n - 1 - gate.targets[0]);
            for (std::size_t i0 = 0; i0 < amps.size(); i0++) {
                if (i0 & mask) {
                    continue;
                }
                std::size_t i1 = i0 | mask;
                Complex a0 = amps[i0];
                Complex a1 = amps[i1];
                amps[i0] = u[0] * a0 + u[1] * a1;
                amps[i1] = u[2] * a0 + u[3] * a1;
            }
            break;
        }
        case GateKind::cz: {
            std::size_t mask = (std::size_t{1} << (n - 1 - gate.targets[0])) | (std::size_t{1} << (n - 1 - gate.targets[1]));
            for (std::size_t i = 0; i < amps.size(); i++) {
                if ((i & mask) == mask) {
                    amps[i] = -amps[i];
                }
            }
            break;
        }
    }
    return state;
}

/// Initialization circuit for a basis state: X180 on qubits that must read 1,
/// identity on the rest.
inline std::vector<Gate> preparation_gates(const RegisterSpec &reg, std::size_t basis_index) {
    std::vector<Gate> out;
    for (std::size_t q = 0; q < reg.n_qubits(); q++) {
        out.push_back(reg.bit(basis_index, q) ? x180(q) : Gate::identity(q));
    }
    return out;
}

inline Statevector run_circuit(const Circuit &circuit, const std::string &initial_state) {
    const RegisterSpec &reg = circuit.register_spec();
    std::size_t index = reg.basis_index(initial_state);
    Statevector s = Statevector::basis(reg.n_qubits(), 0);
    for (const auto &g : preparation_gates(reg, index)) {
        s = apply_gate(std::move(s), g);
    }
    for (const auto &g : circuit.gates()) {
        s = apply_gate(std::move(s), g);
    }
    return s;
}

inline ProbabilityVector ideal_distribution(const Circuit &circuit, const std::string &initial_state) {
    return ProbabilityVector(circuit.register_spec(), run_circuit(circuit, initial_state).probabilities());
}

// Circuit definition files:
// {"name": "...", "register": ["Q0", "Q2"],
//  "gates": [{"gate": "rxy"|"cz"|"id", "theta_deg": x, "phi_deg": y, "targets": [labels]}, ...]}

inline double degrees_to_radians(double deg) {
    return deg * std::numbers::pi / 180.0;
}

inline Circuit circuit_from_json(const json &j) {
    try {
        static const std::vector<std::string> known_top{"name", "register", "gates", "description"};
        for (const auto &[key, _] : j.items()) {
            if (std::find(known_top.begin(), known_top.end(), key) == known_top.end()) {
                throw invalid_input("unknown circuit key '" + key + "'");
            }
        }
        RegisterSpec reg(j.at("register").get<std::vector<std::string>>());
        Circuit circuit(reg, j.value("name", std::string("circuit")));
        for (const auto &g : j.at("gates")) {
            for (const auto &[key, _] : g.items()) {
                if (key != "gate" && key != "theta_deg" && key != "phi_deg" && key != "targets") {
                    throw invalid_input("unknown gate key '" + key + "'");
                }
            }
            std::string kind = g.at("gate").get<std::string>();
            std::vector<std::size_t> targets;
            for (const auto &label : g.at("targets")) {
                targets.push_back(reg.qubit_index(label.get<std::string>()));
            }
            Gate gate;
            gate.targets = std::move(targets);
            if (kind == "rxy") {
                gate.kind = GateKind::rxy;
                gate.theta = degrees_to_radians(g.at("theta_deg").get<double>());
                gate.phi = degrees_to_radians(g.value("phi_deg", 0.0));
            } else if (kind == "cz") {
                gate.kind = GateKind::cz;
            } else if (kind == "id") {
                gate.kind = GateKind::identity;
            } else {
                throw invalid_input("unknown gate '" + kind + "'");
            }
            circuit.add(std::move(gate));
        }
        return circuit;
    } catch (const json::exception &e) {
        throw invalid_input(std::string("malformed circuit definition: ") + e.what());
    }
}

inline json circuit_to_json(const Circuit &c) {
    const auto &labels = c.register_spec().labels();
    json gates = json::array();
    for (const auto &g : c.gates()) {
        json targets = json::array();
        for (std::size_t q : g.targets) {
            targets.push_back(labels[q]);
        }
        switch (g.kind) {
            case GateKind::rxy:
                gates.push_back({{"gate", "rxy"},
                                 {"theta_deg", g.theta * 180.0 / std::numbers::pi},
                                 {"phi_deg", g.phi * 180.0 / std::numbers::pi},
                                 {"targets", targets}});
                break;
            case GateKind::cz:
                gates.push_back({{"gate", "cz"}, {"targets", targets}});
                break;
            case GateKind::identity:
                gates.push_back({{"gate", "id"}, {"targets", targets}});
                break;
        }
    }
    return json{{"name", c.name()}, {"register", labels}, {"gates", gates}};
}

/// The four validation circuits on a two-qubit register whose first label
/// is the CNOT target and second label the control:
///   single_qubit_1: H on q0, X45 then X90 on q1
///   single_qubit_2: H on q0, Y90 on q1
///   cnot:           CNOT(control q1, target q0)
///   h_cnot:         H on q1, then CNOT(control q1, target q0)
inline std::vector<Circuit> validation_circuits(const RegisterSpec &reg) {
    if (reg.n_qubits() != 2) {
        throw invalid_input("the validation circuits need a 2-qubit register");
    }
    const std::size_t q0 = 0;
    const std::size_t q1 = 1;
    std::vector<Circuit> out;
    out.emplace_back(reg, "single_qubit_1");
    out.back().add(compose_hadamard(q0)).add(x45(q1)).add(x90(q1));
    out.emplace_back(reg, "single_qubit_2");
    out.back().add(compose_hadamard(q0)).add(y90(q1));
    out.emplace_back(reg, "cnot");
    out.back().add(compose_cnot(q1, q0));
    out.emplace_back(reg, "h_cnot");
    out.back().add(compose_hadamard(q1)).add(compose_cnot(q1, q0));
    return out;
}

inline bool is_two_qubit_circuit(const Circuit &c) {
    for (const auto &g : c.gates()) {
        if (g.kind == GateKind::cz) {
            return true;
        }
    }
    return false;
}

}  // namespace fcmqem
