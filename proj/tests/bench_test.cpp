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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcmqem/bench.hpp"
#include "gtest/gtest.h"

using namespace fcmqem;
namespace fs = std::filesystem;

namespace {

const RegisterSpec kReg({"Q0", "Q2"});

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    fs::path dir = fs::temp_directory_path() / ("fcmqem_bench_test_" + name);
    fs::remove_all(dir);
    return dir;
}

PatternMixture single_pattern(double q0_p01, double q0_p10, double jitter) {
    ConfusionParams p;
    p.qubits["Q0"] = {q0_p01, q0_p10};
    p.qubits["Q2"] = {0.2, 0.2};
    return PatternMixture{{WeightedPattern{p, 1.0}}, jitter};
}

}  // namespace

TEST(Bench, PlanValidation) {
    BenchmarkPlan plan = default_plan(kReg, zero_noise(kReg), 0);
    EXPECT_NO_THROW(plan.validate());
    BenchmarkPlan bad = plan;
    bad.negativity = NegativityPolicy::raw_only;
    EXPECT_THROW(bad.validate(), Error);
    bad = plan;
    bad.initial_states = {"2"};
    EXPECT_THROW(bad.validate(), Error);
    bad = plan;
    bad.circuits = {Circuit(RegisterSpec({"a", "b"}), "x")};
    EXPECT_THROW(bad.validate(), Error);
    bad = plan;
    bad.repetitions = 0;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(Bench, ZeroNoiseHasNoImprovement) {
    BenchmarkResult r = run_benchmark(default_plan(kReg, zero_noise(kReg), 4));
    ASSERT_EQ(r.records.size(), 4u * 4u * 5u);
    ASSERT_EQ(r.reports.size(), 16u);
    for (const auto &rep : r.reports) {
        EXPECT_EQ(rep.improvement, 0.0) << rep.circuit << " " << rep.initial_state;
    }
    EXPECT_EQ(r.summary.mean, 0.0);
}

TEST(Bench, RecordOrderAndSingleCircuit) {
    BenchmarkPlan plan = default_plan(kReg, reference_device_noise(kReg), 1);
    plan.circuits = {plan.circuits[2]};
    BenchmarkResult r = run_benchmark(plan);
    ASSERT_EQ(r.records.size(), 20u);
    for (std::size_t k = 0; k < 20; k++) {
        EXPECT_EQ(r.records[k].circuit, "cnot");
        EXPECT_EQ(r.records[k].initial_state, kReg.basis_label(k / 5));
        EXPECT_EQ(r.records[k].repetition, k % 5);
        EXPECT_EQ(r.records[k].noisy.shots(), 760u);
    }
}

TEST(Bench, SummaryRecomputesFromPersistedRecords) {
    BenchmarkPlan plan = default_plan(kReg, reference_device_noise(kReg), 3);
    BenchmarkResult r = run_benchmark(plan);
    fs::path dir = scratch("recompute");
    write_benchmark_outputs(dir, plan, r, json::object(), {"csv"});

    std::ifstream lines(dir / "bench_result.jsonl");
    std::string line;
    std::vector<std::pair<std::string, std::string>> keys;
    std::vector<std::vector<double>> unmit;
    std::vector<std::vector<double>> mit;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        json j = json::parse(line);
        std::pair<std::string, std::string> key{j.at("circuit"), j.at("state")};
        if (keys.empty() || keys.back() != key) {
            keys.push_back(key);
            unmit.emplace_back();
            mit.emplace_back();
        }
        unmit.back().push_back(j.at("hf_unmit").get<double>());
        mit.back().push_back(j.at("hf_mit").get<double>());
        count++;
    }
    EXPECT_EQ(count, r.records.size());
    std::vector<FidelityReport> reports;
    for (std::size_t k = 0; k < keys.size(); k++) {
        reports.push_back(make_fidelity_report(keys[k].first, keys[k].second, unmit[k], mit[k]));
    }
    ImprovementSummary s = improvement_stats(reports);
    EXPECT_EQ(s.mean, r.summary.mean);
    EXPECT_EQ(s.mean_error, r.summary.mean_error);
    EXPECT_EQ(s.min, r.summary.min);
    EXPECT_EQ(s.max, r.summary.max);
    EXPECT_EQ(reports_to_csv(reports), slurp(dir / "bench_reports.csv"));

    json summary = json::parse(slurp(dir / "bench_summary.json"));
    EXPECT_EQ(summary.at("record_count"), r.records.size());
    EXPECT_EQ(summary.at("summary").at("mean").get<double>(), r.summary.mean);
    fs::remove_all(dir);
}

TEST(Bench, JobsDoNotChangeOutputs) {
    BenchmarkPlan plan = default_plan(kReg, reference_device_noise(kReg), 11);
    std::vector<std::string> formats{"csv", "plot", "table", "stability"};
    fs::path a = scratch("jobs1");
    fs::path b = scratch("jobs4");
    write_benchmark_outputs(a, plan, run_benchmark(plan, 1), json::object(), formats);
    write_benchmark_outputs(b, plan, run_benchmark(plan, 4), json::object(), formats);
    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
        files++;
    }
    EXPECT_EQ(files, 7u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Bench, RecalibrationAndReuse) {
    BenchmarkPlan plan = default_plan(kReg, reference_device_noise(kReg), 2);
    plan.recalibrate_per_repetition = true;
    BenchmarkResult r = run_benchmark(plan);
    EXPECT_EQ(r.calibrations.size(), 5u);
    for (const auto &rec : r.records) {
        EXPECT_EQ(rec.calibration_index, rec.repetition);
    }
    EXPECT_NE(r.calibrations[0].calibration.matrix(), r.calibrations[1].calibration.matrix());

    BenchmarkPlan reuse = default_plan(kReg, reference_device_noise(kReg), 2);
    reuse.reuse_calibration = CalibrationMatrix(kReg, Matrix::identity(4));
    BenchmarkResult u = run_benchmark(reuse);
    EXPECT_TRUE(u.calibrations.empty());
    ASSERT_EQ(u.mitigations.size(), 1u);
    for (const auto &rep : u.reports) {
        EXPECT_NEAR(rep.improvement, 0.0, 1e-12);
    }
}

TEST(Stability, FixedPatternStaysWithinShotNoise) {
    auto ds = build_datasets(kReg, SimulatorSource{single_pattern(0.2, 0.4, 0.0)}, 40, 760, 8);
    auto report = stability_report(ds, 760);
    int flagged = 0;
    for (const auto &st : report) {
        flagged += st.flagged;
        for (const auto &e : st.outcomes) {
            EXPECT_EQ(e.series.size(), 40u);
        }
    }
    EXPECT_EQ(flagged, 0);
}

TEST(Stability, SingleExperimentHasNoDrift) {
    auto ds = build_datasets(kReg, SimulatorSource{reference_device_noise(kReg)}, 1, 760, 8);
    for (const auto &st : stability_report(ds, 760)) {
        for (const auto &e : st.outcomes) {
            EXPECT_EQ(e.drift, 0.0);
            EXPECT_EQ(e.max_deviation, 0.0);
            EXPECT_FALSE(e.exceeds_bound);
        }
    }
    EXPECT_THROW(stability_report(ds, 0), Error);
}

TEST(Stability, PatternSwitchingIsFlagged) {
    ConfusionParams low;
    low.qubits["Q0"] = {0.05, 0.05};
    low.qubits["Q2"] = {0.05, 0.05};
    ConfusionParams high;
    high.qubits["Q0"] = {0.15, 0.15};
    high.qubits["Q2"] = {0.15, 0.15};
    PatternMixture noise{{WeightedPattern{low, 0.5}, WeightedPattern{high, 0.5}}, 0.0};
    auto ds = build_datasets(kReg, SimulatorSource{noise}, 40, 10000, 3);
    auto report = stability_report(ds, 10000);
    for (const auto &st : report) {
        EXPECT_TRUE(st.flagged) << st.basis_state;
    }
    std::string csv = stability_csv(kReg, report);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 4 * 40);
    EXPECT_EQ(stability_to_json(report).size(), 4u);
}
