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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcmqem/bench.hpp"
#include "fcmqem/calibration.hpp"
#include "fcmqem/config.hpp"
#include "fcmqem/error.hpp"

using namespace fcmqem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numerical = 3;

struct CommonOptions {
    std::string config_path;
    std::string noise;
    std::string seed;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
};

void add_common(CLI::App *cmd, CommonOptions &opts) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file");
    cmd->add_option("--noise", opts.noise, "noise preset: zero, paper-like");
    cmd->add_option("--seed", opts.seed, "master seed (integer or 'auto')");
    cmd->add_option("--set", opts.overrides, "config override key.path=value (repeatable)");
    cmd->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
}

std::uint64_t parse_seed(const std::string &text) {
    if (text == "auto") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(text, &used, 0);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != text.size() || text.empty() || text[0] == '-') {
        throw invalid_input("seed must be a non-negative integer or 'auto'");
    }
    return v;
}

/// Config file, then --set overrides, then explicit flags.
json load_config_document(const CommonOptions &opts) {
    json doc = opts.config_path.empty() ? json::object() : read_json_file(opts.config_path);
    if (!doc.is_object()) {
        throw invalid_input("config must be a JSON object");
    }
    for (const auto &s : opts.overrides) {
        apply_override(doc, s);
    }
    if (!opts.noise.empty()) {
        doc["noise"] = json{{"preset", opts.noise}};
    }
    if (!opts.seed.empty()) {
        doc["seed"] = parse_seed(opts.seed);
    }
    return doc;
}

void write_json(const std::string &path, const json &j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    write_text_file(p, j.dump(2) + "\n");
}

void print_matrix(std::ostream &out, const char *title, const Matrix &m) {
    out << title << "\n";
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); i++) {
        out << " ";
        for (std::size_t j = 0; j < m.cols(); j++) {
            std::snprintf(buf, sizeof(buf), " %10.6f", m(i, j));
            out << buf;
        }
        out << "\n";
    }
}

int cmd_calibrate(const CommonOptions &opts, std::optional<std::size_t> t, std::optional<std::uint64_t> shots, std::string out) {
    json doc = load_config_document(opts);
    if (t) {
        doc["calibration"]["t"] = *t;
    }
    if (shots) {
        doc["calibration"]["shots"] = *shots;
    }
    ToolConfig cfg = parse_config(doc);
    json effective = config_to_json(cfg);
    RegisterSpec reg = cfg.register_spec();

    DatasetSource source = SimulatorSource{noise_from_json(cfg.noise, reg)};
    if (cfg.calibration_source != "simulator") {
        source = ImportedSource{records_from_json(read_json_file(cfg.calibration_source))};
    }
    CalibrationRun run = calibrate(
        reg, source, cfg.calibration_t, cfg.calibration_shots, cfg.effective_fcm(),
        derive_seed(cfg.seed, {calibration_stream, 0}), cfg.inversion, opts.jobs);

    if (out.empty()) {
        out = (std::filesystem::path(cfg.output_dir) / "calibration.json").string();
    }
    write_json(out, calibration_run_to_json(run, effective));

    print_matrix(std::cout, "calibration matrix M:", run.calibration.matrix());
    print_matrix(std::cout, "mitigation matrix S:", run.mitigation.matrix());
    std::cout << "condition number: " << run.mitigation.condition_number() << "\n";
    std::cout << "chosen C per dataset:";
    for (std::size_t i = 0; i < run.partitions.size(); i++) {
        std::cout << " " << run.datasets[i].basis_state_label << "=" << run.partitions[i].clusters();
    }
    std::cout << "\nwrote " << out << "\n";
    return exit_ok;
}

OutcomeCounts counts_from_json(const json &j, const RegisterSpec &reg) {
    try {
        if (j.is_array()) {
            return OutcomeCounts(reg, j.get<std::vector<std::uint64_t>>());
        }
        if (!j.is_object()) {
            throw invalid_input("counts file must be an array or an object");
        }
        for (const auto &[key, _] : j.items()) {
            if (key != "register" && key != "counts" && key != "shots") {
                throw invalid_input("unknown counts key '" + key + "'");
            }
        }
        if (j.contains("register") && j.at("register").get<std::vector<std::string>>() != reg.labels()) {
            throw invalid_input("register mismatch between counts and calibration");
        }
        OutcomeCounts c(reg, j.at("counts").get<std::vector<std::uint64_t>>());
        if (j.contains("shots") && j.at("shots").get<std::uint64_t>() != c.shots()) {
            throw invalid_input("counts do not add up to the stated shots");
        }
        return c;
    } catch (const json::exception &e) {
        throw invalid_input(std::string("malformed counts file: ") + e.what());
    }
}

int cmd_mitigate(const std::string &calibration_path, const std::string &counts_path, const std::string &policy_name,
                 const std::string &out) {
    NegativityPolicy policy = parse_negativity_policy(policy_name);
    CalibrationMatrix m = calibration_from_artifact(read_json_file(calibration_path));
    MitigationMatrix s = invert_calibration(m);
    OutcomeCounts counts = counts_from_json(read_json_file(counts_path), m.register_spec());
    MitigatedResult r = mitigate(counts, s, policy);

    json result = mitigated_to_json(r);
    result["counts"] = counts.counts();
    result["shots"] = counts.shots();
    result["condition_number"] = s.condition_number();
    result["config"] = json{{"calibration", calibration_path}, {"counts", counts_path}, {"policy", policy_name}};
    if (out.empty()) {
        std::cout << result.dump(2) << "\n";
    } else {
        write_json(out, result);
    }
    return exit_ok;
}

int cmd_simulate(const CommonOptions &opts, const std::string &circuit_entry, const std::string &state,
                 std::uint64_t shots, const std::string &out) {
    json doc = load_config_document(opts);
    bool noisy = !opts.noise.empty();
    ToolConfig cfg = parse_config(doc);
    Circuit circuit = resolve_circuit(circuit_entry, cfg.register_spec());
    const RegisterSpec &reg = circuit.register_spec();
    ProbabilityVector ideal = ideal_distribution(circuit, state);

    json result{
        {"circuit", circuit.name()},
        {"register", reg.labels()},
        {"initial_state", state},
        {"ideal", ideal.values()},
    };
    if (noisy) {
        NoiseModel noise = noise_from_json(cfg.noise, reg);
        std::uint64_t seed = derive_seed(cfg.seed, {cell_stream, stable_hash(circuit.name()), reg.basis_index(state), 0});
        OutcomeCounts counts = sample_noisy_counts(ideal, noise, shots, seed);
        result["noise"] = cfg.noise;
        result["shots"] = shots;
        result["seed"] = cfg.seed;
        result["counts"] = counts.counts();
        result["frequencies"] = counts_to_probability(counts).values();
    }
    if (out.empty()) {
        std::cout << result.dump(2) << "\n";
    } else {
        write_json(out, result);
    }
    return exit_ok;
}

int cmd_bench(const CommonOptions &opts, const std::string &circuits, std::optional<std::size_t> reps,
              std::optional<std::uint64_t> shots, std::optional<std::size_t> t, const std::string &policy,
              std::string out) {
    json doc = load_config_document(opts);
    if (!circuits.empty() && circuits != "all") {
        if (circuits.rfind("only:", 0) != 0) {
            throw invalid_input("--circuits takes 'all' or 'only:name[,name...]'");
        }
        std::vector<std::string> names;
        std::stringstream parts(circuits.substr(5));
        std::string name;
        while (std::getline(parts, name, ',')) {
            if (!name.empty()) {
                names.push_back(name);
            }
        }
        if (names.empty()) {
            throw invalid_input("--circuits only: needs at least one name");
        }
        doc["benchmark"]["circuits"] = names;
    }
    if (reps) {
        doc["benchmark"]["repetitions"] = *reps;
    }
    if (shots) {
        doc["benchmark"]["shots"] = *shots;
    }
    if (t) {
        doc["calibration"]["t"] = *t;
    }
    if (!policy.empty()) {
        doc["conventions"]["negativity"] = policy;
    }
    ToolConfig cfg = parse_config(doc);
    json effective = config_to_json(cfg);
    BenchmarkPlan plan = plan_from_config(cfg);
    BenchmarkResult result = run_benchmark(plan, opts.jobs);

    if (out.empty()) {
        out = cfg.output_dir;
    }
    write_benchmark_outputs(out, plan, result, effective, cfg.formats);
    std::cout << format_report_table(result.reports, result.summary);
    std::cout << result.records.size() << " records written to " << out << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Fuzzy C-Means readout error mitigation toolkit"};
    app.require_subcommand(1);

    CommonOptions cal_opts;
    std::optional<std::size_t> cal_t;
    std::optional<std::uint64_t> cal_shots;
    std::string cal_out;
    auto *cal = app.add_subcommand("calibrate", "build the calibration and mitigation matrices");
    add_common(cal, cal_opts);
    cal->add_option("--t", cal_t, "experiments per basis state");
    cal->add_option("--shots", cal_shots, "shots per experiment");
    cal->add_option("--out", cal_out, "artifact path (default <io.output_dir>/calibration.json)");

    std::string mit_cal;
    std::string mit_counts;
    std::string mit_policy = "clip_renormalize";
    std::string mit_out;
    auto *mit = app.add_subcommand("mitigate", "apply a persisted calibration to measured counts");
    mit->add_option("--calibration", mit_cal, "calibration artifact or matrix file")->required();
    mit->add_option("--counts", mit_counts, "counts file")->required();
    mit->add_option("--policy", mit_policy, "clip_renormalize | simplex_projection | raw_only");
    mit->add_option("--out", mit_out, "output path (default stdout)");

    CommonOptions sim_opts;
    std::string sim_circuit;
    std::string sim_state;
    std::uint64_t sim_shots = 760;
    std::string sim_out;
    auto *sim = app.add_subcommand("simulate", "ideal distribution or noisy counts of one circuit");
    add_common(sim, sim_opts);
    sim->add_option("--circuit", sim_circuit, "circuit file or built-in circuit name")->required();
    sim->add_option("--state", sim_state, "initial basis state label")->required();
    sim->add_option("--shots", sim_shots, "shots when sampling with noise")->check(CLI::PositiveNumber);
    sim->add_option("--out", sim_out, "output path (default stdout)");

    CommonOptions bench_opts;
    std::string bench_circuits;
    std::optional<std::size_t> bench_reps;
    std::optional<std::uint64_t> bench_shots;
    std::optional<std::size_t> bench_t;
    std::string bench_policy;
    std::string bench_out;
    auto *bench = app.add_subcommand("bench", "run the mitigation benchmark");
    add_common(bench, bench_opts);
    bench->add_option("--circuits", bench_circuits, "all | only:name[,name...]");
    bench->add_option("--reps", bench_reps, "repetitions per cell");
    bench->add_option("--shots", bench_shots, "shots per benchmark run");
    bench->add_option("--t", bench_t, "calibration experiments per basis state");
    bench->add_option("--policy", bench_policy, "negativity policy");
    bench->add_option("--out", bench_out, "output directory (default io.output_dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*cal) {
            return cmd_calibrate(cal_opts, cal_t, cal_shots, cal_out);
        }
        if (*mit) {
            return cmd_mitigate(mit_cal, mit_counts, mit_policy, mit_out);
        }
        if (*sim) {
            return cmd_simulate(sim_opts, sim_circuit, sim_state, sim_shots, sim_out);
        }
        return cmd_bench(bench_opts, bench_circuits, bench_reps, bench_shots, bench_t, bench_policy, bench_out);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::numerical ? exit_numerical : exit_usage;
    } catch (const json::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}
