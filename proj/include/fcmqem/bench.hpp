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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcmqem/calibration.hpp"
#include "fcmqem/circuit.hpp"
#include "fcmqem/error.hpp"
#include "fcmqem/mitigation.hpp"
#include "fcmqem/noise.hpp"
#include "fcmqem/parallel.hpp"
#include "fcmqem/register.hpp"
#include "fcmqem/rng.hpp"

namespace fcmqem {

// Stream-path tags under the master seed.
inline constexpr std::uint64_t calibration_stream = 1;
inline constexpr std::uint64_t cell_stream = 2;
inline constexpr std::uint64_t fcm_stream = 3;

struct BenchmarkPlan {
    RegisterSpec reg;
    std::vector<Circuit> circuits;
    std::vector<std::string> initial_states;
    std::size_t repetitions = 5;
    std::uint64_t shots = 760;
    NoiseModel noise;

    // Calibration settings, used unless `reuse_calibration` is set.
    std::size_t calibration_t = 10;
    std::uint64_t calibration_shots = 760;
    FcmConfig fcm;
    std::optional<CalibrationMatrix> reuse_calibration;
    bool recalibrate_per_repetition = false;

    NegativityPolicy negativity = NegativityPolicy::clip_renormalize;
    HellingerConvention convention = HellingerConvention::standard;
    InversionPolicy inversion;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (repetitions < 1) {
            throw invalid_input("repetitions must be at least 1");
        }
        if (shots < 1) {
            throw invalid_input("shots must be at least 1");
        }
        if (circuits.empty() || initial_states.empty()) {
            throw invalid_input("benchmark needs at least one circuit and one initial state");
        }
        for (const auto &c : circuits) {
            if (!(c.register_spec() == reg)) {
                throw invalid_input("circuit '" + c.name() + "' register does not match the plan register");
            }
        }
        for (const auto &s : initial_states) {
            reg.basis_index(s);
        }
        if (reuse_calibration && !(reuse_calibration->register_spec() == reg)) {
            throw invalid_input("calibration register does not match the plan register");
        }
        if (negativity == NegativityPolicy::raw_only) {
            throw invalid_input("benchmark scoring needs a normalizing negativity policy");
        }
    }
};

/// All validation circuits from every basis state, five repetitions of 760
/// shots, calibrated with t=10 under the FCM defaults.
inline BenchmarkPlan default_plan(const RegisterSpec &reg, NoiseModel noise, std::uint64_t master_seed) {
    BenchmarkPlan plan{reg, validation_circuits(reg), {}, 5, 760, std::move(noise), 10, 760, FcmConfig{}, std::nullopt,
                       false, NegativityPolicy::clip_renormalize, HellingerConvention::standard, InversionPolicy{},
                       master_seed};
    for (std::size_t b = 0; b < reg.dimension(); b++) {
        plan.initial_states.push_back(reg.basis_label(b));
    }
    plan.fcm.seed = derive_seed(master_seed, {fcm_stream});
    return plan;
}

struct BenchRecord {
    std::string circuit;
    std::string initial_state;
    std::size_t repetition;
    std::size_t calibration_index;
    ProbabilityVector ideal;
    OutcomeCounts noisy;
    MitigatedResult mitigated;
    double hf_unmitigated;
    double hf_mitigated;
};

struct BenchmarkResult {
    std::vector<BenchRecord> records;  // circuit-major, then state, then repetition
    std::vector<FidelityReport> reports;
    ImprovementSummary summary;
    std::vector<CalibrationRun> calibrations;
    std::vector<MitigationMatrix> mitigations;
};

inline std::uint64_t cell_seed(std::uint64_t master, const std::string &circuit, std::size_t state_index, std::size_t rep) {
    return derive_seed(master, {cell_stream, stable_hash(circuit), state_index, rep});
}

/// Groups records into per-(circuit, state) reports in record order.
inline std::vector<FidelityReport> aggregate_records(const std::vector<BenchRecord> &records) {
    std::vector<FidelityReport> out;
    std::size_t k = 0;
    while (k < records.size()) {
        std::vector<double> unmit;
        std::vector<double> mit;
        std::size_t start = k;
        while (k < records.size() && records[k].circuit == records[start].circuit &&
               records[k].initial_state == records[start].initial_state) {
            unmit.push_back(records[k].hf_unmitigated);
            mit.push_back(records[k].hf_mitigated);
            k++;
        }
        out.push_back(make_fidelity_report(records[start].circuit, records[start].initial_state, unmit, mit));
    }
    return out;
}

/// Runs every (circuit, state, repetition) cell: ideal distribution, noisy
/// sampling, mitigation and scoring. Cell randomness comes from
/// cell_seed(master, circuit name, state index, rep), so results do not depend
/// on `jobs` or on which other cells are in the plan.
inline BenchmarkResult run_benchmark(const BenchmarkPlan &plan, unsigned jobs = 1) {
    plan.validate();
    BenchmarkResult result;

    if (plan.reuse_calibration) {
        result.mitigations.push_back(invert_calibration(*plan.reuse_calibration, plan.inversion));
    } else {
        std::size_t runs = plan.recalibrate_per_repetition ? plan.repetitions : 1;
        for (std::size_t r = 0; r < runs; r++) {
            result.calibrations.push_back(calibrate(
                plan.reg, SimulatorSource{plan.noise}, plan.calibration_t, plan.calibration_shots, plan.fcm,
                derive_seed(plan.master_seed, {calibration_stream, r}), plan.inversion, jobs));
            result.mitigations.push_back(result.calibrations.back().mitigation);
        }
    }

    struct Cell {
        std::size_t circuit;
        std::size_t state;
        std::size_t rep;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < plan.circuits.size(); c++) {
        for (std::size_t s = 0; s < plan.initial_states.size(); s++) {
            for (std::size_t r = 0; r < plan.repetitions; r++) {
                cells.push_back(Cell{c, s, r});
            }
        }
    }

    std::vector<std::optional<BenchRecord>> slots(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const Cell &cell = cells[i];
        const Circuit &circuit = plan.circuits[cell.circuit];
        const std::string &state = plan.initial_states[cell.state];
        std::size_t cal = result.mitigations.size() == 1 ? 0 : cell.rep;
        ProbabilityVector ideal = ideal_distribution(circuit, state);
        OutcomeCounts noisy = sample_noisy_counts(
            ideal, plan.noise, plan.shots, cell_seed(plan.master_seed, circuit.name(), plan.reg.basis_index(state), cell.rep));
        ProbabilityVector noisy_p = counts_to_probability(noisy);
        MitigatedResult mitigated = mitigate(noisy_p, result.mitigations[cal], plan.negativity);
        double hf_unmit = hellinger_fidelity(ideal, noisy_p, plan.convention);
        double hf_mit = hellinger_fidelity(ideal, *mitigated.normalized, plan.convention);
        slots[i].emplace(BenchRecord{
            circuit.name(), state, cell.rep, cal, std::move(ideal), std::move(noisy), std::move(mitigated), hf_unmit, hf_mit});
    });
    for (auto &slot : slots) {
        result.records.push_back(std::move(*slot));
    }
    result.reports = aggregate_records(result.records);
    result.summary = improvement_stats(result.reports);
    return result;
}

inline json record_to_json(const BenchRecord &r) {
    return json{
        {"circuit", r.circuit},
        {"state", r.initial_state},
        {"rep", r.repetition},
        {"calibration_index", r.calibration_index},
        {"ideal", r.ideal.values()},
        {"noisy_counts", r.noisy.counts()},
        {"shots", r.noisy.shots()},
        {"mitigated", mitigated_to_json(r.mitigated)},
        {"hf_unmit", r.hf_unmitigated},
        {"hf_mit", r.hf_mitigated},
    };
}

inline json report_to_json(const FidelityReport &r) {
    return json{
        {"circuit", r.circuit},
        {"state", r.initial_state},
        {"hf_unmit", r.hf_unmitigated},
        {"hf_mit", r.hf_mitigated},
        {"hf_unmit_mean", r.unmitigated.mean},
        {"hf_unmit_std", r.unmitigated.stddev},
        {"hf_mit_mean", r.mitigated.mean},
        {"hf_mit_std", r.mitigated.stddev},
        {"improvement", r.improvement},
        {"improvement_error", r.improvement_error},
    };
}

inline json summary_to_json(const ImprovementSummary &s) {
    return json{
        {"cells", s.cells},
        {"mean", s.mean},
        {"mean_error", s.mean_error},
        {"min", s.min},
        {"min_error", s.min_error},
        {"max", s.max},
        {"max_error", s.max_error},
    };
}

inline json benchmark_summary_to_json(const BenchmarkResult &result, const json &effective_config) {
    json reports = json::array();
    for (const auto &r : result.reports) {
        reports.push_back(report_to_json(r));
    }
    json cals = json::array();
    for (const auto &s : result.mitigations) {
        cals.push_back({{"condition_number", s.condition_number()},
                        {"calibration", calibration_to_json(s.source())},
                        {"mitigation", mitigation_to_json(s)}});
    }
    json chosen = json::array();
    for (const auto &run : result.calibrations) {
        json cs = json::array();
        for (const auto &p : run.partitions) {
            cs.push_back(p.clusters());
        }
        chosen.push_back(cs);
    }
    return json{
        {"record_count", result.records.size()},
        {"reports", reports},
        {"summary", summary_to_json(result.summary)},
        {"calibrations", cals},
        {"chosen_c", chosen},
        {"config", effective_config},
    };
}

/// circuit,state,hf_unmit_mean,hf_unmit_std,hf_mit_mean,hf_mit_std,improvement,improvement_error
inline std::string plot_csv(const std::vector<FidelityReport> &reports) {
    std::ostringstream out;
    out << "circuit,state,hf_unmit_mean,hf_unmit_std,hf_mit_mean,hf_mit_std,improvement,improvement_error\n";
    char buf[256];
    for (const auto &r : reports) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.unmitigated.mean, r.unmitigated.stddev,
                      r.mitigated.mean, r.mitigated.stddev, r.improvement, r.improvement_error);
        out << r.circuit << "," << r.initial_state << "," << buf << "\n";
    }
    return out.str();
}

struct EntryStability {
    std::vector<double> series;  // probability of this outcome in each experiment
    double mean = 0.0;
    double drift = 0.0;          // sample standard deviation of the series
    double max_deviation = 0.0;  // max |x_j - mean|
    double binomial_bound = 0.0; // 3 sqrt(mean (1 - mean) / shots)
    bool exceeds_bound = false;  // drift > binomial_bound
};

struct StateStability {
    std::string basis_state;
    std::vector<EntryStability> outcomes;
    bool flagged = false;  // any outcome exceeds its bound
};

/// Per prepared state, the time series of every outcome's readout
/// probability over the calibration experiments, with its spread compared
/// against pure shot noise.
inline std::vector<StateStability> stability_report(const std::vector<Dataset> &datasets, std::uint64_t shots) {
    if (shots == 0) {
        throw invalid_input("shots must be positive");
    }
    std::vector<StateStability> out;
    for (const auto &ds : datasets) {
        StateStability st{ds.basis_state_label, {}, false};
        for (std::size_t i = 0; i < ds.dimension(); i++) {
            EntryStability e;
            for (const auto &x : ds.instances) {
                e.series.push_back(x[i]);
            }
            SampleStats stats = sample_stats(e.series);
            e.mean = stats.mean;
            e.drift = stats.stddev;
            for (double v : e.series) {
                e.max_deviation = std::max(e.max_deviation, std::abs(v - e.mean));
            }
            e.binomial_bound = 3.0 * std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(shots));
            e.exceeds_bound = e.drift > e.binomial_bound;
            st.flagged = st.flagged || e.exceeds_bound;
            st.outcomes.push_back(std::move(e));
        }
        out.push_back(std::move(st));
    }
    return out;
}

/// state,outcome,experiment,probability
inline std::string stability_csv(const RegisterSpec &reg, const std::vector<StateStability> &report) {
    std::ostringstream out;
    out << "state,outcome,experiment,probability\n";
    char buf[64];
    for (const auto &st : report) {
        for (std::size_t i = 0; i < st.outcomes.size(); i++) {
            for (std::size_t j = 0; j < st.outcomes[i].series.size(); j++) {
                std::snprintf(buf, sizeof(buf), "%.17g", st.outcomes[i].series[j]);
                out << st.basis_state << "," << reg.basis_label(i) << "," << j << "," << buf << "\n";
            }
        }
    }
    return out.str();
}

inline json stability_to_json(const std::vector<StateStability> &report) {
    json out = json::array();
    for (const auto &st : report) {
        json entries = json::array();
        for (const auto &e : st.outcomes) {
            entries.push_back({{"series", e.series},
                               {"mean", e.mean},
                               {"drift", e.drift},
                               {"max_deviation", e.max_deviation},
                               {"binomial_bound", e.binomial_bound},
                               {"exceeds_bound", e.exceeds_bound}});
        }
        out.push_back({{"state", st.basis_state}, {"flagged", st.flagged}, {"outcomes", entries}});
    }
    return out;
}

inline void write_text_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw invalid_input("cannot open '" + path.string() + "' for writing");
    }
    f << content;
}

/// Writes bench_result.jsonl (one record per line), bench_summary.json and,
/// per `formats`, bench_reports.csv ("csv"), bench_plot.csv ("plot"),
/// bench_table.txt ("table") and bench_stability.csv ("stability").
inline void write_benchmark_outputs(
    const std::filesystem::path &dir,
    const BenchmarkPlan &plan,
    const BenchmarkResult &result,
    const json &effective_config,
    const std::vector<std::string> &formats) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "bench_result.jsonl", std::ios::binary | std::ios::trunc);
        if (!f) {
            throw invalid_input("cannot write to '" + dir.string() + "'");
        }
        for (const auto &r : result.records) {
            f << record_to_json(r).dump() << "\n";
        }
    }
    write_text_file(dir / "bench_summary.json", benchmark_summary_to_json(result, effective_config).dump(2) + "\n");
    for (const auto &fmt : formats) {
        if (fmt == "csv") {
            write_text_file(dir / "bench_reports.csv", reports_to_csv(result.reports));
        } else if (fmt == "plot") {
            write_text_file(dir / "bench_plot.csv", plot_csv(result.reports));
        } else if (fmt == "table") {
            write_text_file(dir / "bench_table.txt", format_report_table(result.reports, result.summary));
        } else if (fmt == "stability") {
            std::string csv;
            for (std::size_t k = 0; k < result.calibrations.size(); k++) {
                auto report = stability_report(result.calibrations[k].datasets, result.calibrations[k].shots);
                write_text_file(dir / ("bench_stability_" + std::to_string(k) + ".csv"), stability_csv(plan.reg, report));
            }
        } else {
            throw invalid_input("unknown output format '" + fmt + "'");
        }
    }
    for (std::size_t k = 0; k < result.calibrations.size(); k++) {
        write_text_file(
            dir / ("calibration_" + std::to_string(k) + ".json"),
            calibration_run_to_json(result.calibrations[k], effective_config).dump(2) + "\n");
    }
}

}  // namespace fcmqem
