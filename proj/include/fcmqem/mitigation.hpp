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
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcmqem/error.hpp"
#include "fcmqem/register.hpp"

namespace fcmqem {

/// How negative quasi-probabilities are turned into a distribution.
enum class NegativityPolicy {
    clip_renormalize,    // max(q, 0) / sum(max(q, 0))
    simplex_projection,  // Euclidean projection onto the probability simplex
    raw_only,            // keep only the raw quasi-probabilities
};

enum class HellingerConvention {
    standard,        // H = sqrt(1/2 * sum (sqrt p - sqrt q)^2), in [0, 1]
    half_prefactor,  // H = 1/2 * sqrt(sum (sqrt p - sqrt q)^2)
};

struct MitigatedResult {
    QuasiProbabilityVector raw;
    std::optional<ProbabilityVector> normalized;  // absent for raw_only
    NegativityPolicy policy;
    double negativity;  // sum |min(q_i, 0)|
};

/// Euclidean projection of v onto {x : x >= 0, sum x = 1}.
inline std::vector<double> project_to_simplex(const std::vector<double> &v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); j++) {
        cumulative += u[j];
        double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) {
            theta = candidate;
        }
    }
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); k++) {
        out[k] = std::max(v[k] - theta, 0.0);
    }
    // Remove rounding drift so the result passes the strict normalization check.
    double total = 0.0;
    for (double x : out) {
        total += x;
    }
    for (double &x : out) {
        x /= total;
    }
    return out;
}

/// raw = S . p_noisy, followed by the chosen normalization.
inline MitigatedResult mitigate(
    const ProbabilityVector &noisy, const MitigationMatrix &s, NegativityPolicy policy = NegativityPolicy::clip_renormalize) {
    if (noisy.size() != s.matrix().cols()) {
        throw invalid_input("dimension mismatch: " + std::to_string(noisy.size()) + "-entry outcome vector against a " +
                            std::to_string(s.matrix().cols()) + "-dimensional mitigation matrix");
    }
    if (!(noisy.register_spec() == s.register_spec())) {
        throw invalid_input("register mismatch between outcomes and mitigation matrix");
    }
    std::vector<double> q = multiply(s.matrix(), noisy.values());
    if (s.is_pseudo_inverse()) {
        // A pseudo-inverse need not preserve total mass.
        double total = 0.0;
        for (double x : q) {
            total += x;
        }
        if (total == 0.0) {
            throw numerical_error("mitigation produced empty support");
        }
        for (double &x : q) {
            x /= total;
        }
    }
    double negativity = 0.0;
    for (double x : q) {
        negativity += std::max(-x, 0.0);
    }
    QuasiProbabilityVector raw(noisy.register_spec(), q);

    std::optional<ProbabilityVector> normalized;
    switch (policy) {
        case NegativityPolicy::raw_only:
            break;
        case NegativityPolicy::clip_renormalize: {
            double total = 0.0;
            for (double &x : q) {
                x = std::max(x, 0.0);
                total += x;
            }
            if (!(total > 0.0)) {
                throw numerical_error("mitigation produced empty support");
            }
            for (double &x : q) {
                x /= total;
            }
            normalized.emplace(noisy.register_spec(), std::move(q));
            break;
        }
        case NegativityPolicy::simplex_projection:
            normalized.emplace(noisy.register_spec(), project_to_simplex(raw.values()));
            break;
    }
    return MitigatedResult{std::move(raw), std::move(normalized), policy, negativity};
}

inline MitigatedResult mitigate(
    const OutcomeCounts &noisy, const MitigationMatrix &s, NegativityPolicy policy = NegativityPolicy::clip_renormalize) {
    return mitigate(counts_to_probability(noisy), s, policy);
}

/// Squared Hellinger distance. Terms with a zero on either side reduce to
/// p + q, so disjoint supports and identical inputs come out exact.
inline double hellinger_squared(
    const ProbabilityVector &p, const ProbabilityVector &q, HellingerConvention convention = HellingerConvention::standard) {
    if (p.size() != q.size()) {
        throw invalid_input("dimension mismatch in hellinger_distance");
    }
    if (!(p.register_spec() == q.register_spec())) {
        throw invalid_input("register mismatch in hellinger_distance");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); k++) {
        if (p[k] == q[k]) {
            continue;
        }
        if (p[k] == 0.0 || q[k] == 0.0) {
            sum += p[k] + q[k];
            continue;
        }
        double d = std::sqrt(p[k]) - std::sqrt(q[k]);
        sum += d * d;
    }
    return convention == HellingerConvention::standard ? 0.5 * sum : 0.25 * sum;
}

inline double hellinger_distance(
    const ProbabilityVector &p, const ProbabilityVector &q, HellingerConvention convention = HellingerConvention::standard) {
    return std::sqrt(hellinger_squared(p, q, convention));
}

/// HF = (1 - H^2)^2.
inline double hellinger_fidelity(
    const ProbabilityVector &p, const ProbabilityVector &q, HellingerConvention convention = HellingerConvention::standard) {
    double overlap = 1.0 - hellinger_squared(p, q, convention);
    return overlap * overlap;
}

inline double bhattacharyya_coefficient(const ProbabilityVector &p, const ProbabilityVector &q) {
    double bc = 0.0;
    for (std::size_t k = 0; k < p.size(); k++) {
        bc += std::sqrt(p[k] * q[k]);
    }
    return bc;
}

struct SampleStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1) standard deviation; 0 for one sample
};

inline SampleStats sample_stats(const std::vector<double> &xs) {
    SampleStats s;
    if (xs.empty()) {
        return s;
    }
    for (double x : xs) {
        s.mean += x;
    }
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

/// Fidelities of one (circuit, initial state) cell across repetitions.
struct FidelityReport {
    std::string circuit;
    std::string initial_state;
    std::vector<double> hf_unmitigated;  // one entry per repetition
    std::vector<double> hf_mitigated;
    SampleStats unmitigated;
    SampleStats mitigated;
    double improvement = 0.0;        // mitigated.mean - unmitigated.mean
    double improvement_error = 0.0;  // sqrt(sd_mit^2 + sd_unmit^2)
    SampleStats per_rep_improvement;
};

inline FidelityReport make_fidelity_report(
    std::string circuit, std::string initial_state, std::vector<double> hf_unmitigated, std::vector<double> hf_mitigated) {
    if (hf_unmitigated.size() != hf_mitigated.size() || hf_unmitigated.empty()) {
        throw invalid_input("fidelity report needs matching, non-empty repetition lists");
    }
    FidelityReport r;
    r.circuit = std::move(circuit);
    r.initial_state = std::move(initial_state);
    r.unmitigated = sample_stats(hf_unmitigated);
    r.mitigated = sample_stats(hf_mitigated);
    r.improvement = r.mitigated.mean - r.unmitigated.mean;
    r.improvement_error = std::hypot(r.mitigated.stddev, r.unmitigated.stddev);
    std::vector<double> diffs(hf_unmitigated.size());
    for (std::size_t k = 0; k < diffs.size(); k++) {
        diffs[k] = hf_mitigated[k] - hf_unmitigated[k];
    }
    r.per_rep_improvement = sample_stats(diffs);
    r.hf_unmitigated = std::move(hf_unmitigated);
    r.hf_mitigated = std::move(hf_mitigated);
    return r;
}

struct ImprovementSummary {
    std::size_t cells = 0;
    double mean = 0.0;
    double mean_error = 0.0;  // sqrt(sum sigma_i^2) / N
    double min = 0.0;
    double min_error = 0.0;
    double max = 0.0;
    double max_error = 0.0;
};

/// Mean, minimum and maximum improvement over all cells, with errors
/// propagated from the per-cell improvement errors.
inline ImprovementSummary improvement_stats(const std::vector<FidelityReport> &reports) {
    if (reports.empty()) {
        throw invalid_input("improvement_stats needs at least one report");
    }
    ImprovementSummary s;
    s.cells = reports.size();
    double var_sum = 0.0;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t k = 0; k < reports.size(); k++) {
        s.mean += reports[k].improvement;
        var_sum += reports[k].improvement_error * reports[k].improvement_error;
        if (reports[k].improvement < reports[lo].improvement) {
            lo = k;
        }
        if (reports[k].improvement > reports[hi].improvement) {
            hi = k;
        }
    }
    double n = static_cast<double>(reports.size());
    s.mean /= n;
    s.mean_error = std::sqrt(var_sum) / n;
    s.min = reports[lo].improvement;
    s.min_error = reports[lo].improvement_error;
    s.max = reports[hi].improvement;
    s.max_error = reports[hi].improvement_error;
    return s;
}

/// circuit,state,rep,hf_unmit,hf_mit,improvement
inline std::string reports_to_csv(const std::vector<FidelityReport> &reports) {
    std::ostringstream out;
    out << "circuit,state,rep,hf_unmit,hf_mit,improvement\n";
    char buf[96];
    for (const auto &r : reports) {
        for (std::size_t k = 0; k < r.hf_unmitigated.size(); k++) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", r.hf_unmitigated[k], r.hf_mitigated[k],
                          r.hf_mitigated[k] - r.hf_unmitigated[k]);
            out << r.circuit << "," << r.initial_state << "," << k << "," << buf << "\n";
        }
    }
    return out.str();
}

/// Percent table grouped by circuit with Mean/Min/Max footer rows.
inline std::string format_report_table(const std::vector<FidelityReport> &reports, const ImprovementSummary &summary) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %-8s %16s %16s %16s\n", "circuit", "state", "HF unmit (%)", "HF mit (%)",
                  "improvement (%)");
    out << buf;
    std::string current;
    for (const auto &r : reports) {
        if (r.circuit != current) {
            current = r.circuit;
            out << std::string(78, '-') << "\n";
        }
        std::snprintf(buf, sizeof(buf), "%-18s |%s>%*s %9.1f +- %4.1f %9.1f +- %4.1f %+9.1f +- %4.1f\n", r.circuit.c_str(),
                      r.initial_state.c_str(), static_cast<int>(6 - std::min<std::size_t>(6, r.initial_state.size())), "",
                      100 * r.unmitigated.mean, 100 * r.unmitigated.stddev, 100 * r.mitigated.mean,
                      100 * r.mitigated.stddev, 100 * r.improvement, 100 * r.improvement_error);
        out << buf;
    }
    out << std::string(78, '=') << "\n";
    std::snprintf(buf, sizeof(buf), "%61s %+9.1f +- %4.1f\n", "Mean", 100 * summary.mean, 100 * summary.mean_error);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%61s %+9.1f +- %4.1f\n", "Min", 100 * summary.min, 100 * summary.min_error);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%61s %+9.1f +- %4.1f\n", "Max", 100 * summary.max, 100 * summary.max_error);
    out << buf;
    return out.str();
}

inline std::string to_string(NegativityPolicy p) {
    switch (p) {
        case NegativityPolicy::clip_renormalize:
            return "clip_renormalize";
        case NegativityPolicy::simplex_projection:
            return "simplex_projection";
        case NegativityPolicy::raw_only:
            return "raw_only";
    }
    return "?";
}

inline NegativityPolicy parse_negativity_policy(const std::string &s) {
    if (s == "clip_renormalize") {
        return NegativityPolicy::clip_renormalize;
    }
    if (s == "simplex_projection") {
        return NegativityPolicy::simplex_projection;
    }
    if (s == "raw_only") {
        return NegativityPolicy::raw_only;
    }
    throw invalid_input("unknown negativity policy '" + s + "'");
}

inline std::string to_string(HellingerConvention c) {
    return c == HellingerConvention::standard ? "standard" : "half_prefactor";
}

inline HellingerConvention parse_hellinger_convention(const std::string &s) {
    if (s == "standard") {
        return HellingerConvention::standard;
    }
    if (s == "half_prefactor") {
        return HellingerConvention::half_prefactor;
    }
    throw invalid_input("unknown hellinger convention '" + s + "'");
}

inline json mitigated_to_json(const MitigatedResult &r) {
    json j{
        {"register", r.raw.register_spec().labels()},
        {"raw_quasi", r.raw.values()},
        {"policy", to_string(r.policy)},
        {"negativity", r.negativity},
    };
    j["normalized"] = r.normalized ? json(r.normalized->values()) : json(nullptr);
    return j;
}

}  // namespace fcmqem
