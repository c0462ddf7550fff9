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

#include <fstream>
#include <random>

#include "fcmqem/circuit.hpp"
#include "gtest/gtest.h"
#include "oracles/dense_sim.hpp"

using namespace fcmqem;

namespace {

const RegisterSpec kReg({"Q0", "Q2"});

json load(const std::string &name) {
    std::ifstream f(std::string(FCMQEM_DATA_DIR) + "/circuits/" + name + ".json");
    return json::parse(f);
}

Circuit random_circuit(std::mt19937_64 &gen, std::size_t n, int gates) {
    std::vector<std::string> labels;
    for (std::size_t q = 0; q < n; q++) {
        labels.push_back("q" + std::to_string(q));
    }
    Circuit c(RegisterSpec(labels), "random");
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
    for (int k = 0; k < gates; k++) {
        if (n > 1 && k % 3 == 2) {
            std::size_t a = qubit(gen);
            std::size_t b = (a + 1 + qubit(gen) % (n - 1)) % n;
            c.add(Gate::cz(a, b));
        } else {
            c.add(Gate::rxy(qubit(gen), angle(gen), angle(gen)));
        }
    }
    return c;
}

}  // namespace

TEST(Rxy, IsUnitary) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> angle(-7, 7);
    for (int k = 0; k < 100; k++) {
        Unitary2 u = rxy_matrix(angle(gen), angle(gen));
        Complex a = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2];
        Complex b = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
        EXPECT_NEAR(std::abs(a - 1.0), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(b), 0.0, 1e-12);
    }
}

TEST(Rxy, NamedRotations) {
    Unitary2 x = rxy_matrix(M_PI, 0.0);
    EXPECT_NEAR(std::abs(x[1] - Complex(0, -1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x[0]), 0.0, 1e-15);
    Unitary2 y = rxy_matrix(M_PI, M_PI / 2);
    EXPECT_NEAR(std::abs(y[1] - Complex(-1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(y[2] - Complex(1, 0)), 0.0, 1e-15);
}

TEST(Circuit, ComposedHadamardIsHadamardUpToPhase) {
    RegisterSpec reg({"a"});
    Circuit c(reg, "h");
    c.add(compose_hadamard(0));
    Eigen::MatrixXcd u = oracle::circuit_unitary(c);
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    EXPECT_LT((u - oracle::cd(0, -1) * h).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Circuit, ValidationCircuitsMatchDenseOracle) {
    for (const auto &c : validation_circuits(kReg)) {
        for (std::size_t b = 0; b < 4; b++) {
            ProbabilityVector p = ideal_distribution(c, kReg.basis_label(b));
            std::vector<double> ref = oracle::distribution(c, b);
            for (std::size_t k = 0; k < 4; k++) {
                EXPECT_NEAR(p[k], ref[k], 1e-10) << c.name() << " from " << kReg.basis_label(b);
            }
        }
    }
}

TEST(Circuit, CnotTruthTable) {
    // Control is the second label (Q2), target the first (Q0).
    Circuit cnot = validation_circuits(kReg)[2];
    ASSERT_EQ(cnot.name(), "cnot");
    for (std::size_t b = 0; b < 4; b++) {
        std::size_t expected = (b & 1) ? b ^ 2 : b;
        ProbabilityVector p = ideal_distribution(cnot, kReg.basis_label(b));
        for (std::size_t k = 0; k < 4; k++) {
            EXPECT_NEAR(p[k], k == expected ? 1.0 : 0.0, 1e-12) << "from " << kReg.basis_label(b);
        }
    }
    EXPECT_THROW(compose_cnot(1, 1), Error);
}

TEST(Circuit, BellState) {
    Circuit h_cnot = validation_circuits(kReg)[3];
    ProbabilityVector p = ideal_distribution(h_cnot, "00");
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.0, 1e-12);
    EXPECT_NEAR(p[2], 0.0, 1e-12);
    EXPECT_NEAR(p[3], 0.5, 1e-12);
}

TEST(Circuit, EmptyCircuitKeepsPreparedState) {
    Circuit empty(kReg, "empty");
    for (std::size_t b = 0; b < 4; b++) {
        ProbabilityVector p = ideal_distribution(empty, kReg.basis_label(b));
        for (std::size_t k = 0; k < 4; k++) {
            EXPECT_NEAR(p[k], k == b ? 1.0 : 0.0, 1e-15);
        }
    }
}

TEST(Circuit, RandomCircuitsPreserveNormAndMatchOracle) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 60; trial++) {
        std::size_t n = 1 + trial % 5;
        Circuit c = random_circuit(gen, n, 12);
        std::size_t b = gen() % (std::size_t{1} << n);
        Statevector s = run_circuit(c, c.register_spec().basis_label(b));
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
        std::vector<double> ref = oracle::distribution(c, b);
        std::vector<double> p = s.probabilities();
        for (std::size_t k = 0; k < p.size(); k++) {
            EXPECT_NEAR(p[k], ref[k], 1e-10);
        }
    }
}

TEST(CircuitJson, FixturesMatchBuiltins) {
    for (const auto &builtin : validation_circuits(kReg)) {
        Circuit loaded = circuit_from_json(load(builtin.name()));
        EXPECT_EQ(loaded.name(), builtin.name());
        ASSERT_EQ(loaded.gates().size(), builtin.gates().size());
        for (std::size_t b = 0; b < 4; b++) {
            auto p = ideal_distribution(loaded, kReg.basis_label(b));
            auto q = ideal_distribution(builtin, kReg.basis_label(b));
            for (std::size_t k = 0; k < 4; k++) {
                EXPECT_NEAR(p[k], q[k], 1e-15);
            }
        }
    }
}

TEST(CircuitJson, RoundTrip) {
    std::mt19937_64 gen(8);
    Circuit c = random_circuit(gen, 3, 9);
    Circuit back = circuit_from_json(json::parse(circuit_to_json(c).dump()));
    ASSERT_EQ(back.gates().size(), c.gates().size());
    for (std::size_t k = 0; k < c.gates().size(); k++) {
        EXPECT_EQ(back.gates()[k].kind, c.gates()[k].kind);
        EXPECT_EQ(back.gates()[k].targets, c.gates()[k].targets);
        EXPECT_NEAR(back.gates()[k].theta, c.gates()[k].theta, 1e-14);
        EXPECT_NEAR(back.gates()[k].phi, c.gates()[k].phi, 1e-14);
    }
}

TEST(CircuitJson, StrictParsing) {
    json base = load("cnot");
    json bad = base;
    bad["extra"] = 1;
    EXPECT_THROW(circuit_from_json(bad), Error);
    bad = base;
    bad["gates"][0]["gate"] = "swap";
    EXPECT_THROW(circuit_from_json(bad), Error);
    bad = base;
    bad["gates"][0]["targets"] = {"Q7"};
    EXPECT_THROW(circuit_from_json(bad), Error);
    bad = base;
    bad["gates"][2]["targets"] = {"Q0"};
    EXPECT_THROW(circuit_from_json(bad), Error);
    bad = base;
    bad["gates"][0]["angle"] = 3;
    EXPECT_THROW(circuit_from_json(bad), Error);
    bad = base;
    bad.erase("gates");
    EXPECT_THROW(circuit_from_json(bad), Error);
}

TEST(Circuit, ValidationCircuitsNeedTwoQubits) {
    EXPECT_THROW(validation_circuits(RegisterSpec({"a", "b", "c"})), Error);
    EXPECT_FALSE(is_two_qubit_circuit(validation_circuits(kReg)[0]));
    EXPECT_TRUE(is_two_qubit_circuit(validation_circuits(kReg)[2]));
}
