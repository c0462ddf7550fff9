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

#include <Eigen/Dense>
#include <random>

#include "fcmqem/linalg.hpp"
#include "fcmqem/register.hpp"
#include "gtest/gtest.h"

using namespace fcmqem;

namespace {

Matrix reference_calibration_matrix() {
    return Matrix::from_rows({
        {0.74, 0.16, 0.36, 0.08},
        {0.13, 0.67, 0.07, 0.33},
        {0.11, 0.03, 0.48, 0.12},
        {0.02, 0.14, 0.09, 0.47},
    });
}

Eigen::MatrixXd to_eigen(const Matrix &m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            e(i, j) = m(i, j);
        }
    }
    return e;
}

Matrix random_column_stochastic(std::size_t d, std::mt19937_64 &gen, double diag_boost) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(d, d);
    for (std::size_t j = 0; j < d; j++) {
        double total = 0.0;
        for (std::size_t i = 0; i < d; i++) {
            m(i, j) = u(gen) + (i == j ? diag_boost : 0.0);
            total += m(i, j);
        }
        for (std::size_t i = 0; i < d; i++) {
            m(i, j) /= total;
        }
    }
    return m;
}

}  // namespace

TEST(RegisterSpec, FirstLabelIsMostSignificant) {
    RegisterSpec reg({"Q0", "Q2"});
    EXPECT_EQ(reg.n_qubits(), 2u);
    EXPECT_EQ(reg.dimension(), 4u);
    EXPECT_EQ(reg.basis_index("10"), 2u);
    EXPECT_EQ(reg.basis_index("01"), 1u);
    EXPECT_EQ(reg.basis_label(2), "10");
    EXPECT_EQ(reg.bit(2, reg.qubit_index("Q0")), 1u);
    EXPECT_EQ(reg.bit(2, reg.qubit_index("Q2")), 0u);
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_EQ(reg.basis_index(reg.basis_label(k)), k);
    }
}

TEST(RegisterSpec, RejectsBadLabels) {
    EXPECT_THROW(RegisterSpec({}), Error);
    EXPECT_THROW(RegisterSpec({"a", "a"}), Error);
    EXPECT_THROW(RegisterSpec({"a", ""}), Error);
    EXPECT_THROW(RegisterSpec({"a", "b", "c", "d", "e", "f"}), Error);
    EXPECT_NO_THROW(RegisterSpec({"a", "b", "c", "d", "e"}));
    RegisterSpec reg({"Q0", "Q2"});
    EXPECT_THROW(reg.basis_index("1"), Error);
    EXPECT_THROW(reg.basis_index("12"), Error);
    EXPECT_THROW(reg.qubit_index("Q1"), Error);
}

TEST(OutcomeCounts, ShotsAndDimension) {
    RegisterSpec reg({"Q0", "Q2"});
    OutcomeCounts c(reg, {1, 2, 3, 4});
    EXPECT_EQ(c.shots(), 10u);
    EXPECT_EQ(counts_to_probability(c)[3], 0.4);
    try {
        OutcomeCounts bad(reg, {1, 2, 3});
        FAIL();
    } catch (const Error &e) {
        EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos);
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
    EXPECT_THROW(counts_to_probability(OutcomeCounts(reg, {0, 0, 0, 0})), Error);
}

TEST(ProbabilityVector, Validation) {
    RegisterSpec reg({"a"});
    EXPECT_NO_THROW(ProbabilityVector(reg, {0.25, 0.75}));
    EXPECT_THROW(ProbabilityVector(reg, {0.5, 0.6}), Error);
    EXPECT_THROW(ProbabilityVector(reg, {-0.1, 1.1}), Error);
    EXPECT_THROW(ProbabilityVector(reg, {1.0}), Error);
    EXPECT_THROW(QuasiProbabilityVector(reg, {0.5, 0.6}), Error);
    EXPECT_NO_THROW(QuasiProbabilityVector(reg, {-0.2, 1.2}));
}

TEST(ProbabilityVector, TensorProductOrdersFirstFactorHigh) {
    ProbabilityVector a(RegisterSpec({"x"}), {0.25, 0.75});
    ProbabilityVector b(RegisterSpec({"y"}), {0.4, 0.6});
    ProbabilityVector ab = tensor_probability(a, b);
    EXPECT_EQ(ab.register_spec().labels(), (std::vector<std::string>{"x", "y"}));
    EXPECT_DOUBLE_EQ(ab[0], 0.1);
    EXPECT_DOUBLE_EQ(ab[1], 0.15);
    EXPECT_DOUBLE_EQ(ab[2], 0.3);
    EXPECT_DOUBLE_EQ(ab[3], 0.45);
    EXPECT_THROW(tensor_probability(a, a), Error);
}

TEST(Matrix, KroneckerMatchesDefinition) {
    Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix b = Matrix::from_rows({{0, 5}, {6, 7}});
    Matrix k = kronecker(a, b);
    ASSERT_EQ(k.rows(), 4u);
    for (std::size_t i = 0; i < 4; i++) {
        for (std::size_t j = 0; j < 4; j++) {
            EXPECT_EQ(k(i, j), a(i / 2, j / 2) * b(i % 2, j % 2));
        }
    }
}

TEST(Matrix, NormOneIsMaxColumnSum) {
    Matrix a = Matrix::from_rows({{1, -7}, {-2, 3}});
    EXPECT_EQ(norm_1(a), 10.0);
}

TEST(Lu, InverseAgreesWithEigenOnRandomMatrices) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; trial++) {
        std::size_t d = std::size_t{1} << (1 + trial % 5);
        Matrix m = random_column_stochastic(d, gen, 1.0);
        LuFactorization f = lu_factor(m);
        ASSERT_FALSE(f.singular);
        Matrix inv = lu_inverse(f);
        Eigen::MatrixXd ref = to_eigen(m).fullPivLu().inverse();
        EXPECT_LT((to_eigen(inv) - ref).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
    }
}

TEST(Calibration, RejectsNonStochastic) {
    RegisterSpec reg({"a"});
    EXPECT_THROW(CalibrationMatrix(reg, Matrix::from_rows({{0.9, 0.1}, {0.2, 0.9}})), Error);
    EXPECT_THROW(CalibrationMatrix(reg, Matrix::from_rows({{1.1, 0.0}, {-0.1, 1.0}})), Error);
    EXPECT_THROW(CalibrationMatrix(reg, Matrix::identity(4)), Error);
}

TEST(Calibration, ReferenceMatrixInverts) {
    RegisterSpec reg({"Q0", "Q2"});
    CalibrationMatrix m(reg, reference_calibration_matrix());
    MitigationMatrix s = invert_calibration(m);
    EXPECT_FALSE(s.is_pseudo_inverse());
    Matrix product = s.matrix() * m.matrix();
    EXPECT_LT(max_abs_diff(product, Matrix::identity(4)), 1e-9);
    Eigen::MatrixXd e = to_eigen(m.matrix());
    double cond = e.cwiseAbs().colwise().sum().maxCoeff() * e.inverse().cwiseAbs().colwise().sum().maxCoeff();
    EXPECT_NEAR(s.condition_number(), cond, 1e-9 * cond);
}

TEST(Calibration, SingularMatrixIsReported) {
    RegisterSpec reg({"a"});
    CalibrationMatrix m(reg, Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
    try {
        invert_calibration(m);
        FAIL();
    } catch (const SingularMatrixError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
        EXPECT_GT(e.condition_number(), 1e12);
    }
    InversionPolicy ls;
    ls.mode = InversionPolicy::Mode::least_squares;
    MitigationMatrix s = invert_calibration(m, ls);
    EXPECT_TRUE(s.is_pseudo_inverse());
    EXPECT_NEAR(s.matrix()(0, 0), 0.5, 1e-12);
}

TEST(Calibration, ConditionCapIsConfigurable) {
    RegisterSpec reg({"a"});
    CalibrationMatrix m(reg, Matrix::from_rows({{0.6, 0.4}, {0.4, 0.6}}));
    InversionPolicy tight;
    tight.condition_cap = 2.0;
    EXPECT_THROW(invert_calibration(m, tight), SingularMatrixError);
    EXPECT_NEAR(invert_calibration(m).condition_number(), 5.0, 1e-12);
}

TEST(Calibration, SMTimesMIsIdentityForRandomWellConditioned) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 100; trial++) {
        std::size_t n = 1 + trial % 4;
        std::vector<std::string> labels;
        for (std::size_t q = 0; q < n; q++) {
            labels.push_back("q" + std::to_string(q));
        }
        RegisterSpec reg(labels);
        CalibrationMatrix m(reg, random_column_stochastic(reg.dimension(), gen, 2.0 * reg.dimension()));
        MitigationMatrix s = invert_calibration(m);
        EXPECT_LT(max_abs_diff(s.matrix() * m.matrix(), Matrix::identity(reg.dimension())), 1e-9);
    }
}

TEST(Json, MatrixRoundTripIsExact) {
    RegisterSpec reg({"Q0", "Q2"});
    CalibrationMatrix m(reg, reference_calibration_matrix(), json{{"note", "x"}});
    json j = json::parse(calibration_to_json(m).dump());
    CalibrationMatrix back = calibration_from_json(j);
    EXPECT_EQ(back.matrix(), m.matrix());
    EXPECT_EQ(back.register_spec(), reg);
    EXPECT_EQ(back.provenance(), m.provenance());
    EXPECT_THROW(calibration_from_json(json{{"register", {"a"}}}), Error);
}
