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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcmqem/error.hpp"
#include "fcmqem/linalg.hpp"
#include "json.hpp"

namespace fcmqem {

using json = nlohmann::json;

/// An ordered set of qubit labels. Outcome index bit (n-1-k) holds the state
/// of labels()[k], so the first label is the most significant bit: for the
/// register (Q0, Q2) the index 0b10 means Q0=1, Q2=0.
class RegisterSpec {
   public:
    static constexpr std::size_t max_qubits = 5;

    explicit RegisterSpec(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) {
            throw invalid_input("register needs at least one qubit");
        }
        if (labels_.size() > max_qubits) {
            throw invalid_input("register exceeds the " + std::to_string(max_qubits) + "-qubit cap");
        }
        std::set<std::string> seen;
        for (const auto &label : labels_) {
            if (label.empty() || !seen.insert(label).second) {
                throw invalid_input("register labels must be non-empty and unique");
            }
        }
    }

    const std::vector<std::string> &labels() const {
        return labels_;
    }
    std::size_t n_qubits() const {
        return labels_.size();
    }
    std::size_t dimension() const {
        return std::size_t{1} << labels_.size();
    }

    bool contains(std::string_view label) const {
        for (const auto &l : labels_) {
            if (l == label) {
                return true;
            }
        }
        return false;
    }

    std::size_t qubit_index(std::string_view label) const {
        for (std::size_t k = 0; k < labels_.size(); k++) {
            if (labels_[k] == label) {
                return k;
            }
        }
        throw invalid_input("unknown qubit label '" + std::string(label) + "'");
    }

    /// Bit position of qubit k inside an outcome index.
    std::size_t bit_position(std::size_t qubit) const {
        return n_qubits() - 1 - qubit;
    }

    unsigned bit(std::size_t outcome, std::size_t qubit) const {
        return static_cast<unsigned>((outcome >> bit_position(qubit)) & 1u);
    }

    /// "01" -> 1 for a 2-qubit register; character k is qubit k.
    std::size_t basis_index(std::string_view bits) const {
        if (bits.size() != n_qubits()) {
            throw invalid_input("basis state '" + std::string(bits) + "' does not match the register size");
        }
        std::size_t index = 0;
        for (char ch : bits) {
            if (ch != '0' && ch != '1') {
                throw invalid_input("basis state '" + std::string(bits) + "' must contain only 0 and 1");
            }
            index = (index << 1) | static_cast<std::size_t>(ch - '0');
        }
        return index;
    }

    std::string basis_label(std::size_t index) const {
        std::string out(n_qubits(), '0');
        for (std::size_t k = 0; k < n_qubits(); k++) {
            out[k] = bit(index, k) ? '1' : '0';
        }
        return out;
    }

    bool operator==(const RegisterSpec &other) const = default;

   private:
    std::vector<std::string> labels_;
};

/// Event counts over the 2^n outcomes of one experiment.
class OutcomeCounts {
   public:
    OutcomeCounts(RegisterSpec reg, std::vector<std::uint64_t> counts)
        : reg_(std::move(reg)), counts_(std::move(counts)) {
        if (counts_.size() != reg_.dimension()) {
            throw invalid_input("dimension mismatch: counts have " + std::to_string(counts_.size()) +
                                " entries, register expects " + std::to_string(reg_.dimension()));
        }
        shots_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
    }

    const RegisterSpec &register_spec() const {
        return reg_;
    }
    const std::vector<std::uint64_t> &counts() const {
        return counts_;
    }
    std::uint64_t shots() const {
        return shots_;
    }

    bool operator==(const OutcomeCounts &other) const = default;

   private:
    RegisterSpec reg_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t shots_ = 0;
};

/// Non-negative vector over the register's outcomes summing to one.
class ProbabilityVector {
   public:
    static constexpr double sum_tolerance = 1e-12;

    ProbabilityVector(RegisterSpec reg, std::vector<double> p) : reg_(std::move(reg)), p_(std::move(p)) {
        if (p_.size() != reg_.dimension()) {
            throw invalid_input("dimension mismatch: probability vector has " + std::to_string(p_.size()) +
                                " entries, register expects " + std::to_string(reg_.dimension()));
        }
        double total = 0.0;
        for (double v : p_) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw invalid_input("probability entries must be finite and non-negative");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > sum_tolerance) {
            throw invalid_input("probability vector does not sum to 1");
        }
    }

    const RegisterSpec &register_spec() const {
        return reg_;
    }
    const std::vector<double> &values() const {
        return p_;
    }
    double operator[](std::size_t k) const {
        return p_[k];
    }
    std::size_t size() const {
        return p_.size();
    }

    bool operator==(const ProbabilityVector &other) const = default;

   private:
    RegisterSpec reg_;
    std::vector<double> p_;
};

/// Real vector summing to one whose entries may be negative.
class QuasiProbabilityVector {
   public:
    static constexpr double sum_tolerance = 1e-9;

    QuasiProbabilityVector(RegisterSpec reg, std::vector<double> q) : reg_(std::move(reg)), q_(std::move(q)) {
        if (q_.size() != reg_.dimension()) {
            throw invalid_input("dimension mismatch for quasi-probability vector");
        }
        double total = 0.0;
        for (double v : q_) {
            if (!std::isfinite(v)) {
                throw numerical_error("quasi-probability entries must be finite");
            }
            total += v;
        }
        if (std::abs(total - 1.0) > sum_tolerance) {
            throw numerical_error("quasi-probability vector does not sum to 1");
        }
    }

    const RegisterSpec &register_spec() const {
        return reg_;
    }
    const std::vector<double> &values() const {
        return q_;
    }
    double operator[](std::size_t k) const {
        return q_[k];
    }

   private:
    RegisterSpec reg_;
    std::vector<double> q_;
};

/// Column-stochastic assignment matrix: entry (i, j) is the probability of
/// reading outcome i after preparing basis state j.
class CalibrationMatrix {
   public:
    static constexpr double column_tolerance = 1e-9;

    CalibrationMatrix(RegisterSpec reg, Matrix m, json provenance = json::object())
        : reg_(std::move(reg)), m_(std::move(m)), provenance_(std::move(provenance)) {
        std::size_t d = reg_.dimension();
        if (m_.rows() != d || m_.cols() != d) {
            throw invalid_input("dimension mismatch: calibration matrix must be " + std::to_string(d) + "x" +
                                std::to_string(d));
        }
        for (std::size_t c = 0; c < d; c++) {
            double total = 0.0;
            for (std::size_t r = 0; r < d; r++) {
                double v = m_(r, c);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw invalid_input("calibration matrix entries must lie in [0, 1]");
                }
                total += v;
            }
            if (std::abs(total - 1.0) > column_tolerance) {
                throw invalid_input("calibration matrix column " + std::to_string(c) + " does not sum to 1");
            }
        }
    }

    const RegisterSpec &register_spec() const {
        return reg_;
    }
    const Matrix &matrix() const {
        return m_;
    }
    const json &provenance() const {
        return provenance_;
    }

   private:
    RegisterSpec reg_;
    Matrix m_;
    json provenance_;
};

struct InversionPolicy {
    enum class Mode { exact, least_squares };
    Mode mode = Mode::exact;
    double condition_cap = 1e12;
};

/// S = M^-1 together with the calibration it came from.
class MitigationMatrix {
   public:
    MitigationMatrix(CalibrationMatrix source, Matrix s, double condition_number, bool pseudo_inverse)
        : source_(std::move(source)),
          s_(std::move(s)),
          condition_number_(condition_number),
          pseudo_inverse_(pseudo_inverse) {
    }

    const RegisterSpec &register_spec() const {
        return source_.register_spec();
    }
    const Matrix &matrix() const {
        return s_;
    }
    double condition_number() const {
        return condition_number_;
    }
    bool is_pseudo_inverse() const {
        return pseudo_inverse_;
    }
    const CalibrationMatrix &source() const {
        return source_;
    }

   private:
    CalibrationMatrix source_;
    Matrix s_;
    double condition_number_;
    bool pseudo_inverse_;
};

inline ProbabilityVector counts_to_probability(const OutcomeCounts &c) {
    if (c.shots() == 0) {
        throw invalid_input("empty experiment");
    }
    std::vector<double> p(c.counts().size());
    double shots = static_cast<double>(c.shots());
    for (std::size_t k = 0; k < p.size(); k++) {
        p[k] = static_cast<double>(c.counts()[k]) / shots;
    }
    return ProbabilityVector(c.register_spec(), std::move(p));
}

/// Joint distribution of two independent registers; `a` forms the high bits.
inline ProbabilityVector tensor_probability(const ProbabilityVector &a, const ProbabilityVector &b) {
    std::vector<std::string> labels = a.register_spec().labels();
    for (const auto &label : b.register_spec().labels()) {
        if (a.register_spec().contains(label)) {
            throw invalid_input("tensor_probability requires disjoint registers (shared qubit '" + label + "')");
        }
        labels.push_back(label);
    }
    RegisterSpec joint(std::move(labels));
    std::vector<double> out;
    out.reserve(a.size() * b.size());
    for (double x : a.values()) {
        for (double y : b.values()) {
            out.push_back(x * y);
        }
    }
    return ProbabilityVector(std::move(joint), std::move(out));
}

/// Inverts a calibration matrix by LU with partial pivoting. The condition
/// number is the exact 1-norm value ||M||_1 * ||M^-1||_1.
inline MitigationMatrix invert_calibration(const CalibrationMatrix &m, const InversionPolicy &policy = {}) {
    const Matrix &a = m.matrix();
    LuFactorization f = lu_factor(a);
    double condition = std::numeric_limits<double>::infinity();
    Matrix inverse;
    if (!f.singular) {
        inverse = lu_inverse(f);
        condition = norm_1(a) * norm_1(inverse);
    }
    if (!std::isfinite(condition) || condition > policy.condition_cap) {
        if (policy.mode == InversionPolicy::Mode::exact) {
            throw SingularMatrixError(condition);
        }
        return MitigationMatrix(m, pseudo_inverse(a), condition, true);
    }
    return MitigationMatrix(m, std::move(inverse), condition, false);
}

// JSON schema shared by every persisted matrix or vector:
//   {"register": [labels], "shape": [rows, cols], "data": [row-major], "provenance": {...}}
// Doubles are written in shortest round-trip form, so reading a file back
// reproduces every entry bit for bit.

inline json matrix_to_json(const RegisterSpec &reg, const Matrix &m, const json &provenance = json::object()) {
    return json{
        {"register", reg.labels()},
        {"shape", {m.rows(), m.cols()}},
        {"data", std::vector<double>(m.data().begin(), m.data().end())},
        {"provenance", provenance},
    };
}

inline json vector_to_json(const RegisterSpec &reg, const std::vector<double> &v, const json &provenance = json::object()) {
    return json{
        {"register", reg.labels()},
        {"shape", {v.size()}},
        {"data", v},
        {"provenance", provenance},
    };
}

struct MatrixDocument {
    RegisterSpec reg;
    Matrix matrix;
    json provenance;
};

inline MatrixDocument matrix_from_json(const json &j) {
    try {
        RegisterSpec reg(j.at("register").get<std::vector<std::string>>());
        auto shape = j.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 2) {
            throw invalid_input("matrix document needs a 2-element shape");
        }
        Matrix m(shape[0], shape[1], j.at("data").get<std::vector<double>>());
        json provenance = j.contains("provenance") ? j.at("provenance") : json::object();
        return MatrixDocument{std::move(reg), std::move(m), std::move(provenance)};
    } catch (const json::exception &e) {
        throw invalid_input(std::string("malformed matrix document: ") + e.what());
    }
}

inline json calibration_to_json(const CalibrationMatrix &m) {
    return matrix_to_json(m.register_spec(), m.matrix(), m.provenance());
}

inline CalibrationMatrix calibration_from_json(const json &j) {
    MatrixDocument doc = matrix_from_json(j);
    return CalibrationMatrix(std::move(doc.reg), std::move(doc.matrix), std::move(doc.provenance));
}

inline json mitigation_to_json(const MitigationMatrix &s) {
    json provenance = {
        {"condition_number", s.condition_number()},
        {"pseudo_inverse", s.is_pseudo_inverse()},
        {"source", s.source().provenance()},
    };
    return matrix_to_json(s.register_spec(), s.matrix(), provenance);
}

}  // namespace fcmqem
