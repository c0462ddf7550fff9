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
#include <cstdint>
#include <string>
#include <vector>

#include "fcmqem/error.hpp"
#include "fcmqem/linalg.hpp"
#include "fcmqem/register.hpp"
#include "fcmqem/rng.hpp"

namespace fcmqem {

/// Fuzzy C-Means hyperparameters. Defaults are m=2, maxiter=10, phi=0.005,
/// C in {2,3,4}.
struct FcmConfig {
    double fuzzifier = 2.0;
    int max_iter = 10;
    double tolerance = 0.005;
    std::vector<int> c_candidates{2, 3, 4};
    std::uint64_t seed = 0;

    void validate() const {
        if (!(fuzzifier > 1.0) || !std::isfinite(fuzzifier)) {
            throw invalid_input("fuzzifier m must be a finite value > 1");
        }
        if (max_iter < 1) {
            throw invalid_input("maxiter must be positive");
        }
        if (!(tolerance > 0.0)) {
            throw invalid_input("convergence threshold phi must be positive");
        }
        if (c_candidates.empty()) {
            throw invalid_input("cluster-count candidate list is empty");
        }
        for (int c : c_candidates) {
            if (c < 2) {
                throw invalid_input("cluster counts must be at least 2");
            }
        }
    }

    int max_candidate() const {
        return *std::max_element(c_candidates.begin(), c_candidates.end());
    }
};

/// The t probability vectors collected for one prepared basis state.
struct Dataset {
    std::vector<std::vector<double>> instances;
    std::string basis_state_label;
    std::vector<std::string> experiment_ids;

    std::size_t size() const {
        return instances.size();
    }
    std::size_t dimension() const {
        return instances.empty() ? 0 : instances.front().size();
    }

    void validate() const {
        if (instances.empty()) {
            throw invalid_input("dataset has no instances");
        }
        for (const auto &x : instances) {
            if (x.size() != dimension()) {
                throw invalid_input("dataset instances differ in dimension");
            }
            double total = 0.0;
            for (double v : x) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw invalid_input("dataset instance has a negative or non-finite entry");
                }
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw invalid_input("dataset instance does not sum to 1");
            }
        }
    }
};

struct FuzzyPartition {
    Matrix memberships;                          // C x t; column j is instance j
    std::vector<std::vector<double>> centroids;  // C vectors of dimension d
    double fpc = 0.0;
    int iterations_used = 0;
    bool converged = false;
    std::vector<double> objective_history;  // J(W, V) after each iteration

    std::size_t clusters() const {
        return memberships.rows();
    }
    std::size_t instances() const {
        return memberships.cols();
    }
};

namespace detail {

inline double squared_distance(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); k++) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Distances below 1e-12 count as coincident.
inline constexpr double coincident_squared_distance = 1e-24;

}  // namespace detail

/// Seeded uniform random memberships with unit column sums.
inline Matrix initial_memberships(std::size_t clusters, std::size_t instances, std::uint64_t seed) {
    Rng rng(seed);
    Matrix w(clusters, instances);
    for (std::size_t j = 0; j < instances; j++) {
        double total = 0.0;
        for (std::size_t k = 0; k < clusters; k++) {
            w(k, j) = 1.0 - rng.uniform();
            total += w(k, j);
        }
        for (std::size_t k = 0; k < clusters; k++) {
            w(k, j) /= total;
        }
    }
    return w;
}

/// v_k = sum_j w_kj^m x_j / sum_j w_kj^m
inline std::vector<std::vector<double>> fcm_centroids(const Dataset &data, const Matrix &w, double fuzzifier) {
    std::size_t d = data.dimension();
    std::vector<std::vector<double>> v(w.rows(), std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < w.rows(); k++) {
        double denom = 0.0;
        for (std::size_t j = 0; j < data.size(); j++) {
            double weight = std::pow(w(k, j), fuzzifier);
            denom += weight;
            for (std::size_t i = 0; i < d; i++) {
                v[k][i] += weight * data.instances[j][i];
            }
        }
        if (denom == 0.0) {
            // Every instance is pinned to some other centroid; fall back to the plain mean.
            for (std::size_t i = 0; i < d; i++) {
                v[k][i] = 0.0;
                for (const auto &x : data.instances) {
                    v[k][i] += x[i] / static_cast<double>(data.size());
                }
            }
            continue;
        }
        for (std::size_t i = 0; i < d; i++) {
            v[k][i] /= denom;
        }
    }
    return v;
}

/// w_kj = 1 / sum_l (|x_j - v_k| / |x_j - v_l|)^(2/(m-1)). An instance sitting
/// on one or more centroids splits its membership evenly among them.
inline Matrix fcm_memberships(const Dataset &data, const std::vector<std::vector<double>> &centroids, double fuzzifier) {
    std::size_t c = centroids.size();
    double exponent = 1.0 / (fuzzifier - 1.0);
    Matrix w(c, data.size());
    std::vector<double> d2(c);
    for (std::size_t j = 0; j < data.size(); j++) {
        std::size_t coincident = 0;
        for (std::size_t k = 0; k < c; k++) {
            d2[k] = detail::squared_distance(data.instances[j], centroids[k]);
            coincident += d2[k] < detail::coincident_squared_distance;
        }
        if (coincident > 0) {
            for (std::size_t k = 0; k < c; k++) {
                w(k, j) = d2[k] < detail::coincident_squared_distance ? 1.0 / static_cast<double>(coincident) : 0.0;
            }
            continue;
        }
        for (std::size_t k = 0; k < c; k++) {
            double s = 0.0;
            for (std::size_t l = 0; l < c; l++) {
                s += std::pow(d2[k] / d2[l], exponent);
            }
            w(k, j) = 1.0 / s;
        }
    }
    return w;
}

/// J(W, V) = sum_k sum_j w_kj^m |x_j - v_k|^2
inline double fcm_objective(
    const Dataset &data, const Matrix &w, const std::vector<std::vector<double>> &centroids, double fuzzifier) {
    double total = 0.0;
    for (std::size_t k = 0; k < w.rows(); k++) {
        for (std::size_t j = 0; j < w.cols(); j++) {
            total += std::pow(w(k, j), fuzzifier) * detail::squared_distance(data.instances[j], centroids[k]);
        }
    }
    return total;
}

/// Partition coefficient (1/t) sum_k sum_j w_kj^2, in [1/C, 1].
inline double fpc(const Matrix &w) {
    double total = 0.0;
    for (double v : w.data()) {
        total += v * v;
    }
    return total / static_cast<double>(w.cols());
}

inline double fpc(const FuzzyPartition &partition) {
    return fpc(partition.memberships);
}

/// Bezdek alternating optimization from a given initial membership matrix.
/// Each iteration updates the centroids, then the memberships; the loop
/// stops once the largest entry-wise change in W drops below the tolerance
/// or after max_iter iterations.
inline FuzzyPartition fcm_cluster(const Dataset &data, Matrix initial, const FcmConfig &cfg) {
    cfg.validate();
    data.validate();
    std::size_t c = initial.rows();
    if (c < 2) {
        throw invalid_input("at least 2 clusters are required");
    }
    if (c > data.size()) {
        throw invalid_input("more clusters than instances");
    }
    if (initial.cols() != data.size()) {
        throw invalid_input("initial membership matrix does not match the dataset");
    }

    FuzzyPartition out;
    out.memberships = std::move(initial);
    for (int iter = 1; iter <= cfg.max_iter; iter++) {
        out.centroids = fcm_centroids(data, out.memberships, cfg.fuzzifier);
        Matrix next = fcm_memberships(data, out.centroids, cfg.fuzzifier);
        double change = max_abs_diff(next, out.memberships);
        out.memberships = std::move(next);
        out.objective_history.push_back(fcm_objective(data, out.memberships, out.centroids, cfg.fuzzifier));
        out.iterations_used = iter;
        if (change < cfg.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.fpc = fpc(out.memberships);
    return out;
}

/// Runs FCM with C clusters from the seeded initialization for (cfg.seed, C).
inline FuzzyPartition fcm_cluster(const Dataset &data, int c, const FcmConfig &cfg) {
    if (c < 2) {
        throw invalid_input("at least 2 clusters are required");
    }
    if (static_cast<std::size_t>(c) > data.size()) {
        throw invalid_input("more clusters than instances");
    }
    auto clusters = static_cast<std::size_t>(c);
    return fcm_cluster(data, initial_memberships(clusters, data.size(), derive_seed(cfg.seed, {clusters})), cfg);
}

/// Runs every candidate C and keeps the partition with the largest fpc; ties
/// go to the smallest C.
inline FuzzyPartition select_best_c(const Dataset &data, const FcmConfig &cfg) {
    cfg.validate();
    std::vector<int> candidates = cfg.c_candidates;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    FuzzyPartition best = fcm_cluster(data, candidates.front(), cfg);
    for (std::size_t k = 1; k < candidates.size(); k++) {
        FuzzyPartition p = fcm_cluster(data, candidates[k], cfg);
        if (p.fpc > best.fpc) {
            best = std::move(p);
        }
    }
    return best;
}

/// Shannon entropy (bits) of one membership column.
inline double membership_entropy(const Matrix &w, std::size_t instance) {
    double h = 0.0;
    for (std::size_t k = 0; k < w.rows(); k++) {
        double p = w(k, instance);
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// The instance whose memberships are spread most evenly across clusters,
/// i.e. the column of maximal entropy. Ties go to the smallest index.
inline std::size_t most_uncertain_instance(const FuzzyPartition &partition, const Dataset &data) {
    if (partition.instances() != data.size() || partition.instances() == 0) {
        throw invalid_input("partition was not computed over this dataset");
    }
    std::size_t best = 0;
    double best_entropy = membership_entropy(partition.memberships, 0);
    for (std::size_t j = 1; j < partition.instances(); j++) {
        double h = membership_entropy(partition.memberships, j);
        if (h > best_entropy) {
            best = j;
            best_entropy = h;
        }
    }
    return best;
}

inline json partition_to_json(const FuzzyPartition &p) {
    std::vector<std::vector<double>> w(p.clusters(), std::vector<double>(p.instances()));
    for (std::size_t k = 0; k < p.clusters(); k++) {
        for (std::size_t j = 0; j < p.instances(); j++) {
            w[k][j] = p.memberships(k, j);
        }
    }
    return json{
        {"clusters", p.clusters()},
        {"memberships", w},
        {"centroids", p.centroids},
        {"fpc", p.fpc},
        {"iterations_used", p.iterations_used},
        {"converged", p.converged},
        {"objective_history", p.objective_history},
    };
}

inline json fcm_config_to_json(const FcmConfig &cfg) {
    return json{
        {"m", cfg.fuzzifier},
        {"maxiter", cfg.max_iter},
        {"phi", cfg.tolerance},
        {"c_candidates", cfg.c_candidates},
        {"seed", cfg.seed},
    };
}

}  // namespace fcmqem
