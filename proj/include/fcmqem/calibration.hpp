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

#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "fcmqem/circuit.hpp"
#include "fcmqem/error.hpp"
#include "fcmqem/fcm.hpp"
#include "fcmqem/noise.hpp"
#include "fcmqem/parallel.hpp"
#include "fcmqem/register.hpp"
#include "fcmqem/rng.hpp"

namespace fcmqem {

inline constexpr int calibration_schema_version = 1;

/// One externally measured experiment: counts observed after preparing
/// `basis_state`.
struct CountRecord {
    std::string basis_state;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> counts;
};

/// Calibration data produced by the built-in simulator.
struct SimulatorSource {
    NoiseModel noise;
};

/// Calibration data read from experiment records.
struct ImportedSource {
    std::vector<CountRecord> records;
};

using DatasetSource = std::variant<SimulatorSource, ImportedSource>;

inline std::vector<CountRecord> records_from_json(const json &j) {
    if (!j.is_array()) {
        throw invalid_input("count records must be a JSON array");
    }
    std::vector<CountRecord> out;
    try {
        for (const auto &r : j) {
            for (const auto &[key, _] : r.items()) {
                if (key != "basis_state" && key != "shots" && key != "counts") {
                    throw invalid_input("unknown count-record key '" + key + "'");
                }
            }
            out.push_back(CountRecord{
                r.at("basis_state").get<std::string>(),
                r.at("shots").get<std::uint64_t>(),
                r.at("counts").get<std::vector<std::uint64_t>>(),
            });
        }
    } catch (const json::exception &e) {
        throw invalid_input(std::string("malformed count record: ") + e.what());
    }
    return out;
}

inline json records_to_json(const std::vector<CountRecord> &records) {
    json out = json::array();
    for (const auto &r : records) {
        out.push_back({{"basis_state", r.basis_state}, {"shots", r.shots}, {"counts", r.counts}});
    }
    return out;
}

inline std::string experiment_id(const std::string &basis_label, std::size_t j) {
    return "cal/" + basis_label + "/" + std::to_string(j);
}

/// Builds one dataset of `t` probability vectors per basis state, in basis
/// index order. Simulated experiment j of basis state b uses the stream
/// derive_seed(seed, {b, j}); experiments run in (b, j) order.
inline std::vector<Dataset> build_datasets(
    const RegisterSpec &reg, const DatasetSource &source, std::size_t t, std::uint64_t shots, std::uint64_t seed) {
    if (t < 1) {
        throw invalid_input("t must be at least 1");
    }
    if (shots < 1) {
        throw invalid_input("shots must be at least 1");
    }
    std::vector<Dataset> out(reg.dimension());
    for (std::size_t b = 0; b < reg.dimension(); b++) {
        out[b].basis_state_label = reg.basis_label(b);
    }

    if (const auto *sim = std::get_if<SimulatorSource>(&source)) {
        Circuit empty(reg, "init");
        for (std::size_t b = 0; b < reg.dimension(); b++) {
            ProbabilityVector ideal = ideal_distribution(empty, out[b].basis_state_label);
            for (std::size_t j = 0; j < t; j++) {
                OutcomeCounts counts = sample_noisy_counts(ideal, sim->noise, shots, derive_seed(seed, {b, j}));
                out[b].instances.push_back(counts_to_probability(counts).values());
                out[b].experiment_ids.push_back(experiment_id(out[b].basis_state_label, j));
            }
        }
        return out;
    }

    const auto &records = std::get<ImportedSource>(source).records;
    for (std::size_t r = 0; r < records.size(); r++) {
        const CountRecord &rec = records[r];
        std::size_t b = reg.basis_index(rec.basis_state);
        if (rec.counts.size() != reg.dimension()) {
            throw invalid_input("record " + std::to_string(r) + " does not match the register dimension");
        }
        std::uint64_t total = std::accumulate(rec.counts.begin(), rec.counts.end(), std::uint64_t{0});
        if (rec.shots != shots || total != shots) {
            throw invalid_input("record " + std::to_string(r) + " has " + std::to_string(total) + " events / shots " +
                                std::to_string(rec.shots) + ", expected " + std::to_string(shots));
        }
        std::size_t j = out[b].instances.size();
        out[b].instances.push_back(counts_to_probability(OutcomeCounts(reg, rec.counts)).values());
        out[b].experiment_ids.push_back(experiment_id(rec.basis_state, j));
    }
    for (const auto &ds : out) {
        if (ds.size() != t) {
            throw invalid_input("basis state " + ds.basis_state_label + " has " + std::to_string(ds.size()) +
                                " records, expected " + std::to_string(t));
        }
    }
    return out;
}

struct FuzzyStepResult {
    std::vector<FuzzyPartition> partitions;
    std::vector<std::size_t> selected_indices;
};

/// Per dataset i: pick the best C (seeded with derive_seed(cfg.seed, {i}))
/// and the most uncertain instance of that partition.
inline FuzzyStepResult run_fuzzy_step(const std::vector<Dataset> &datasets, const FcmConfig &cfg, unsigned jobs = 1) {
    cfg.validate();
    for (const auto &ds : datasets) {
        if (ds.size() < static_cast<std::size_t>(cfg.max_candidate())) {
            throw invalid_input("more clusters than instances");
        }
    }
    FuzzyStepResult out;
    out.partitions.resize(datasets.size());
    out.selected_indices.resize(datasets.size());
    parallel_for(datasets.size(), jobs, [&](std::size_t i) {
        FcmConfig local = cfg;
        local.seed = derive_seed(cfg.seed, {i});
        out.partitions[i] = select_best_c(datasets[i], local);
        out.selected_indices[i] = most_uncertain_instance(out.partitions[i], datasets[i]);
    });
    return out;
}

/// Column i of M is the selected instance of dataset i.
inline CalibrationMatrix assemble_calibration(
    const RegisterSpec &reg, const std::vector<Dataset> &datasets, const std::vector<std::size_t> &selected) {
    std::size_t d = reg.dimension();
    if (datasets.size() != d || selected.size() != d) {
        throw invalid_input("need one dataset and one selected index per basis state");
    }
    Matrix m(d, d);
    json ids = json::array();
    for (std::size_t i = 0; i < d; i++) {
        if (datasets[i].basis_state_label != reg.basis_label(i)) {
            throw invalid_input("dataset order must match basis index order");
        }
        if (selected[i] >= datasets[i].size()) {
            throw invalid_input("selected index out of range for dataset " + datasets[i].basis_state_label);
        }
        const auto &x = datasets[i].instances[selected[i]];
        if (x.size() != d) {
            throw invalid_input("dataset instance does not match the register dimension");
        }
        ProbabilityVector column(reg, x);
        m.set_column(i, column.values());
        ids.push_back(datasets[i].experiment_ids.empty() ? json(selected[i])
                                                         : json(datasets[i].experiment_ids[selected[i]]));
    }
    json provenance{{"selection_rule", "fcm_most_uncertain_membership"}, {"experiments", ids}};
    return CalibrationMatrix(reg, std::move(m), std::move(provenance));
}

struct CalibrationRun {
    RegisterSpec reg;
    std::size_t t_experiments;
    std::uint64_t shots;
    std::uint64_t seed;
    FcmConfig fcm_config;
    std::vector<Dataset> datasets;
    std::vector<FuzzyPartition> partitions;
    std::vector<std::size_t> selected_indices;
    CalibrationMatrix calibration;
    MitigationMatrix mitigation;
};

/// Dataset creation, fuzzy step, assembly of M and inversion to S.
inline CalibrationRun calibrate(
    const RegisterSpec &reg,
    const DatasetSource &source,
    std::size_t t,
    std::uint64_t shots,
    const FcmConfig &cfg,
    std::uint64_t seed,
    const InversionPolicy &policy = {},
    unsigned jobs = 1) {
    cfg.validate();
    if (t < static_cast<std::size_t>(cfg.max_candidate())) {
        throw invalid_input("more clusters than instances");
    }
    std::vector<Dataset> datasets = build_datasets(reg, source, t, shots, seed);
    FuzzyStepResult fuzzy = run_fuzzy_step(datasets, cfg, jobs);
    CalibrationMatrix m = assemble_calibration(reg, datasets, fuzzy.selected_indices);
    MitigationMatrix s = invert_calibration(m, policy);
    return CalibrationRun{
        reg,
        t,
        shots,
        seed,
        cfg,
        std::move(datasets),
        std::move(fuzzy.partitions),
        std::move(fuzzy.selected_indices),
        m,
        std::move(s),
    };
}

inline json calibration_run_to_json(const CalibrationRun &run, const json &effective_config = json::object()) {
    json datasets = json::array();
    for (const auto &ds : run.datasets) {
        datasets.push_back({
            {"basis_state", ds.basis_state_label},
            {"experiment_ids", ds.experiment_ids},
            {"instances", ds.instances},
        });
    }
    json partitions = json::array();
    std::vector<std::size_t> chosen_c;
    for (const auto &p : run.partitions) {
        partitions.push_back(partition_to_json(p));
        chosen_c.push_back(p.clusters());
    }
    return json{
        {"schema_version", calibration_schema_version},
        {"kind", "calibration_run"},
        {"register", run.reg.labels()},
        {"t", run.t_experiments},
        {"shots", run.shots},
        {"seed", run.seed},
        {"fcm", fcm_config_to_json(run.fcm_config)},
        {"datasets", datasets},
        {"partitions", partitions},
        {"chosen_c", chosen_c},
        {"selected_indices", run.selected_indices},
        {"calibration", calibration_to_json(run.calibration)},
        {"mitigation", mitigation_to_json(run.mitigation)},
        {"condition_number", run.mitigation.condition_number()},
        {"config", effective_config},
    };
}

/// Reads M from either a persisted calibration run or a bare matrix document.
inline CalibrationMatrix calibration_from_artifact(const json &j) {
    if (!j.is_object()) {
        throw invalid_input("calibration file must be a JSON object");
    }
    if (j.contains("schema_version")) {
        if (j.at("schema_version") != calibration_schema_version) {
            throw invalid_input("unsupported calibration schema_version");
        }
        return calibration_from_json(j.at("calibration"));
    }
    return calibration_from_json(j);
}

}  // namespace fcmqem
