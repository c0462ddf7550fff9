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
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "fcmqem/error.hpp"
#include "fcmqem/register.hpp"
#include "fcmqem/rng.hpp"

namespace fcmqem {

/// Per-qubit assignment errors: p01 = P(read 1 | prepared 0),
/// p10 = P(read 0 | prepared 1).
struct QubitConfusion {
    double p01 = 0.0;
    double p10 = 0.0;

    void validate() const {
        if (!(p01 >= 0.0 && p01 <= 1.0 && p10 >= 0.0 && p10 <= 1.0)) {
            throw invalid_input("flip probabilities must lie in [0, 1]");
        }
    }

    /// ((1-p01, p10), (p01, 1-p10)); columns are the prepared state.
    Matrix matrix() const {
        return Matrix::from_rows({{1.0 - p01, p10}, {p01, 1.0 - p10}});
    }

    bool operator==(const QubitConfusion &) const = default;
};

struct ConfusionParams {
    std::map<std::string, QubitConfusion> qubits;

    const QubitConfusion &at(const std::string &label) const {
        auto it = qubits.find(label);
        if (it == qubits.end()) {
            throw invalid_input("missing readout parameters for qubit '" + label + "'");
        }
        return it->second;
    }
};

struct WeightedPattern {
    ConfusionParams params;
    double weight = 1.0;
};

/// A set of readout error patterns. Each experiment draws one pattern by
/// weight, then perturbs every flip probability with N(0, jitter_sigma)
/// noise (clamped to [0, 1]); the result stays fixed for all of that
/// experiment's shots.
struct PatternMixture {
    std::vector<WeightedPattern> patterns;
    double jitter_sigma = 0.0;

    void validate(const RegisterSpec &reg) const {
        if (patterns.empty()) {
            throw invalid_input("noise model needs at least one pattern");
        }
        double total = 0.0;
        for (const auto &p : patterns) {
            if (!(p.weight >= 0.0)) {
                throw invalid_input("pattern weights must be non-negative");
            }
            total += p.weight;
            for (const auto &label : reg.labels()) {
                p.params.at(label).validate();
            }
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw invalid_input("pattern weights must sum to 1");
        }
        if (!(jitter_sigma >= 0.0)) {
            throw invalid_input("jitter_sigma must be non-negative");
        }
    }
};

enum class ThresholdRule { intersection, midpoint };

struct IqBlob {
    std::array<double, 2> mean{0.0, 0.0};
    double sigma = 1.0;  // isotropic standard deviation
};

struct IqQubit {
    IqBlob ground;
    IqBlob excited;
};

/// Gaussian I-Q readout: each shot lands at a point drawn from the blob of
/// the qubit's true state, is projected on the axis through both blob
/// centres, and is compared against a threshold on that axis.
struct IqModel {
    std::map<std::string, IqQubit> qubits;
    ThresholdRule rule = ThresholdRule::intersection;

    const IqQubit &at(const std::string &label) const {
        auto it = qubits.find(label);
        if (it == qubits.end()) {
            throw invalid_input("missing I-Q parameters for qubit '" + label + "'");
        }
        return it->second;
    }
};

using NoiseModel = std::variant<PatternMixture, IqModel>;

/// Tensor product of the per-qubit confusion matrices in register order.
inline CalibrationMatrix effective_confusion(const ConfusionParams &params, const RegisterSpec &reg) {
    Matrix m = Matrix::identity(1);
    for (const auto &label : reg.labels()) {
        const QubitConfusion &q = params.at(label);
        q.validate();
        m = kronecker(m, q.matrix());
    }
    return CalibrationMatrix(reg, std::move(m), json{{"source", "effective_confusion"}});
}

/// Pattern-weighted average confusion, the expected assignment matrix of a
/// mixture without jitter.
inline Matrix expected_confusion(const PatternMixture &mixture, const RegisterSpec &reg) {
    std::size_t d = reg.dimension();
    Matrix out(d, d);
    for (const auto &p : mixture.patterns) {
        Matrix m = effective_confusion(p.params, reg).matrix();
        for (std::size_t r = 0; r < d; r++) {
            for (std::size_t c = 0; c < d; c++) {
                out(r, c) += p.weight * m(r, c);
            }
        }
    }
    return out;
}

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double gaussian_density(double x, double mean, double sigma) {
    double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Equal-density point of N(mu0, s0) and N(mu1, s1) lying between the means.
/// Falls back to the midpoint when the densities do not cross there.
inline double gaussian_intersection(double mu0, double s0, double mu1, double s1) {
    if (mu0 == mu1) {
        throw invalid_input("coincident blob means");
    }
    double mid = 0.5 * (mu0 + mu1);
    if (s0 == s1) {
        return mid;
    }
    // ln s0 + (x-mu0)^2 / (2 s0^2) = ln s1 + (x-mu1)^2 / (2 s1^2)
    double a = 0.5 / (s0 * s0) - 0.5 / (s1 * s1);
    double b = mu1 / (s1 * s1) - mu0 / (s0 * s0);
    double c = 0.5 * mu0 * mu0 / (s0 * s0) - 0.5 * mu1 * mu1 / (s1 * s1) + std::log(s0 / s1);
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        return mid;
    }
    double root = std::sqrt(disc);
    // Numerically stable pair of roots.
    double qv = -0.5 * (b + std::copysign(root, b));
    std::array<double, 2> roots{qv / a, qv != 0.0 ? c / qv : qv / a};
    double lo = std::min(mu0, mu1);
    double hi = std::max(mu0, mu1);
    for (double x : roots) {
        if (x >= lo && x <= hi) {
            return x;
        }
    }
    return mid;
}

struct IqAxis {
    std::array<double, 2> direction;  // unit vector from ground to excited centre
    double ground;                    // projected ground mean
    double excited;                   // projected excited mean
};

inline IqAxis iq_axis(const IqQubit &q) {
    double dx = q.excited.mean[0] - q.ground.mean[0];
    double dy = q.excited.mean[1] - q.ground.mean[1];
    double len = std::hypot(dx, dy);
    if (len == 0.0) {
        throw invalid_input("coincident blob means");
    }
    std::array<double, 2> u{dx / len, dy / len};
    return IqAxis{
        u,
        q.ground.mean[0] * u[0] + q.ground.mean[1] * u[1],
        q.excited.mean[0] * u[0] + q.excited.mean[1] * u[1],
    };
}

/// Discrimination threshold for one qubit, as a coordinate on its
/// projection axis (points at or beyond it read as 1).
inline double iq_threshold(const IqModel &model, const std::string &label) {
    const IqQubit &q = model.at(label);
    IqAxis axis = iq_axis(q);
    if (model.rule == ThresholdRule::midpoint) {
        return 0.5 * (axis.ground + axis.excited);
    }
    return gaussian_intersection(axis.ground, q.ground.sigma, axis.excited, q.excited.sigma);
}

/// Analytic flip probabilities implied by an I-Q model.
inline ConfusionParams iq_confusion(const IqModel &model, const RegisterSpec &reg) {
    ConfusionParams out;
    for (const auto &label : reg.labels()) {
        const IqQubit &q = model.at(label);
        IqAxis axis = iq_axis(q);
        double t = iq_threshold(model, label);
        out.qubits[label] = QubitConfusion{
            1.0 - standard_normal_cdf((t - axis.ground) / q.ground.sigma),
            standard_normal_cdf((t - axis.excited) / q.excited.sigma),
        };
    }
    return out;
}

/// Draws the pattern and jittered flip rates used for one experiment.
inline ConfusionParams realize_pattern(const PatternMixture &mixture, Rng &rng) {
    double u = rng.uniform();
    std::size_t chosen = mixture.patterns.size() - 1;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < mixture.patterns.size(); k++) {
        cumulative += mixture.patterns[k].weight;
        if (u < cumulative) {
            chosen = k;
            break;
        }
    }
    ConfusionParams out = mixture.patterns[chosen].params;
    if (mixture.jitter_sigma > 0.0) {
        for (auto &[label, q] : out.qubits) {
            q.p01 = std::clamp(q.p01 + mixture.jitter_sigma * rng.normal(), 0.0, 1.0);
            q.p10 = std::clamp(q.p10 + mixture.jitter_sigma * rng.normal(), 0.0, 1.0);
        }
    }
    return out;
}

namespace detail {

// Inverse-CDF draw. upper_bound never lands on a zero-probability outcome.
inline std::size_t draw_outcome(const std::vector<double> &cumulative, Rng &rng) {
    double u = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
        it = std::lower_bound(cumulative.begin(), cumulative.end(), cumulative.back());
    }
    return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace detail

/// Simulates `shots` single-shot readouts of a state whose ideal outcome
/// distribution is `ideal`. Fully determined by `seed`.
inline OutcomeCounts sample_noisy_counts(
    const ProbabilityVector &ideal, const NoiseModel &noise, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw invalid_input("shots must be positive");
    }
    const RegisterSpec &reg = ideal.register_spec();
    std::size_t n = reg.n_qubits();
    Rng rng(seed);

    std::vector<double> cumulative(ideal.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < ideal.size(); k++) {
        acc += ideal[k];
        cumulative[k] = acc;
    }
    std::vector<std::uint64_t> counts(ideal.size(), 0);

    if (const auto *mixture = std::get_if<PatternMixture>(&noise)) {
        mixture->validate(reg);
        ConfusionParams active = realize_pattern(*mixture, rng);
        std::vector<QubitConfusion> per_qubit;
        for (const auto &label : reg.labels()) {
            per_qubit.push_back(active.at(label));
        }
        for (std::uint64_t s = 0; s < shots; s++) {
            std::size_t outcome = detail::draw_outcome(cumulative, rng);
            for (std::size_t q = 0; q < n; q++) {
                std::size_t mask = std::size_t{1} << reg.bit_position(q);
                double flip = (outcome & mask) ? per_qubit[q].p10 : per_qubit[q].p01;
                if (rng.uniform() < flip) {
                    outcome ^= mask;
                }
            }
            counts[outcome]++;
        }
    } else {
        const auto &model = std::get<IqModel>(noise);
        std::vector<IqQubit> qubits;
        std::vector<IqAxis> axes;
        std::vector<double> thresholds;
        for (const auto &label : reg.labels()) {
            qubits.push_back(model.at(label));
            axes.push_back(iq_axis(qubits.back()));
            thresholds.push_back(iq_threshold(model, label));
        }
        for (std::uint64_t s = 0; s < shots; s++) {
            std::size_t truth = detail::draw_outcome(cumulative, rng);
            std::size_t read = 0;
            for (std::size_t q = 0; q < n; q++) {
                std::size_t mask = std::size_t{1} << reg.bit_position(q);
                const IqBlob &blob = (truth & mask) ? qubits[q].excited : qubits[q].ground;
                double i = blob.mean[0] + blob.sigma * rng.normal();
                double qv = blob.mean[1] + blob.sigma * rng.normal();
                double projected = i * axes[q].direction[0] + qv * axes[q].direction[1];
                if (projected >= thresholds[q]) {
                    read |= mask;
                }
            }
            counts[read]++;
        }
    }
    return OutcomeCounts(reg, std::move(counts));
}

/// No readout error on any qubit.
inline PatternMixture zero_noise(const RegisterSpec &reg) {
    ConfusionParams p;
    for (const auto &label : reg.labels()) {
        p.qubits[label] = QubitConfusion{0.0, 0.0};
    }
    return PatternMixture{{WeightedPattern{p, 1.0}}, 0.0};
}

/// Readout fidelities of the reference two-transmon device: the first qubit
/// reads |0> correctly 80% of the time and |1> 60%; every other qubit 80% for
/// both. A second "elevated" pattern adds 0.05 to every flip rate and occurs
/// in 20% of experiments; flip rates jitter by 0.01 per experiment.
inline PatternMixture reference_device_noise(const RegisterSpec &reg) {
    ConfusionParams nominal;
    ConfusionParams elevated;
    for (std::size_t k = 0; k < reg.n_qubits(); k++) {
        QubitConfusion q = k == 0 ? QubitConfusion{0.2, 0.4} : QubitConfusion{0.2, 0.2};
        nominal.qubits[reg.labels()[k]] = q;
        elevated.qubits[reg.labels()[k]] = QubitConfusion{q.p01 + 0.05, q.p10 + 0.05};
    }
    return PatternMixture{{WeightedPattern{nominal, 0.8}, WeightedPattern{elevated, 0.2}}, 0.01};
}

}  // namespace fcmqem
