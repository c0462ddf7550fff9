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
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fcmqem/bench.hpp"
#include "fcmqem/calibration.hpp"
#include "fcmqem/circuit.hpp"
#include "fcmqem/error.hpp"
#include "fcmqem/fcm.hpp"
#include "fcmqem/mitigation.hpp"
#include "fcmqem/noise.hpp"
#include "fcmqem/register.hpp"

namespace fcmqem {

/// Tool configuration. Every section is optional; absent keys take the
/// defaults below and unknown keys are rejected.
///
///   {
///     "seed": 0,
///     "register": {"labels": ["Q0", "Q2"]},
///     "noise": {"preset": "paper-like"},
///     "fcm": {"m": 2, "maxiter": 10, "phi": 0.005, "c_candidates": [2, 3, 4], "seed": null},
///     "calibration": {"t": 10, "shots": 760, "source": "simulator"},
///     "benchmark": {"circuits": [...], "initial_states": "all", "repetitions": 5, "shots": 760,
///                   "calibration": "fresh", "recalibrate_per_repetition": false},
///     "io": {"output_dir": "out", "formats": ["csv", "plot", "table"]},
///     "conventions": {"hellinger": "standard", "negativity": "clip_renormalize",
///                     "inversion": "exact", "condition_cap": 1e12}
///   }
///
/// Noise presets: "zero", "paper-like", "custom" (keys patterns, jitter_sigma)
/// and "iq" (keys qubits, threshold_rule).
struct ToolConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> labels{"Q0", "Q2"};
    json noise{{"preset", "paper-like"}};

    FcmConfig fcm;
    std::optional<std::uint64_t> fcm_seed;  // derived from `seed` when absent

    std::size_t calibration_t = 10;
    std::uint64_t calibration_shots = 760;
    std::string calibration_source = "simulator";  // or a count-record file

    std::vector<std::string> circuits{"single_qubit_1", "single_qubit_2", "cnot", "h_cnot"};
    std::vector<std::string> initial_states;  // empty means every basis state
    std::size_t repetitions = 5;
    std::uint64_t bench_shots = 760;
    std::string bench_calibration = "fresh";  // or "reuse:<path>"
    bool recalibrate_per_repetition = false;

    std::string output_dir = "out";
    std::vector<std::string> formats{"csv", "plot", "table"};

    HellingerConvention hellinger = HellingerConvention::standard;
    NegativityPolicy negativity = NegativityPolicy::clip_renormalize;
    InversionPolicy inversion;

    RegisterSpec register_spec() const {
        return RegisterSpec(labels);
    }

    /// FCM settings with the seed resolved.
    FcmConfig effective_fcm() const {
        FcmConfig out = fcm;
        out.seed = fcm_seed ? *fcm_seed : derive_seed(seed, {fcm_stream});
        return out;
    }
};

namespace detail {

inline void check_keys(const json &section, const std::string &where, std::initializer_list<const char *> allowed) {
    if (!section.is_object()) {
        throw invalid_input("config section '" + where + "' must be an object");
    }
    for (const auto &[key, _] : section.items()) {
        bool ok = false;
        for (const char *a : allowed) {
            ok = ok || key == a;
        }
        if (!ok) {
            throw invalid_input("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

template <typename T>
void read_key(const json &section, const char *key, T &out) {
    if (section.contains(key)) {
        out = section.at(key).get<T>();
    }
}

inline QubitConfusion confusion_from_json(const json &j, const std::string &where) {
    check_keys(j, where, {"p01", "p10"});
    QubitConfusion q{j.at("p01").get<double>(), j.at("p10").get<double>()};
    q.validate();
    return q;
}

inline IqBlob blob_from_json(const json &j, const std::string &where) {
    check_keys(j, where, {"mean", "sigma"});
    IqBlob b;
    auto mean = j.at("mean").get<std::vector<double>>();
    if (mean.size() != 2) {
        throw invalid_input(where + ".mean must have two entries");
    }
    b.mean = {mean[0], mean[1]};
    b.sigma = j.at("sigma").get<double>();
    if (!(b.sigma > 0.0)) {
        throw invalid_input(where + ".sigma must be positive");
    }
    return b;
}

}  // namespace detail

/// Builds the readout noise model named by a noise section.
inline NoiseModel noise_from_json(const json &section, const RegisterSpec &reg) {
    detail::check_keys(section, "noise", {"preset", "patterns", "jitter_sigma", "qubits", "threshold_rule"});
    std::string preset = section.value("preset", std::string("paper-like"));
    auto only = [&](std::initializer_list<const char *> allowed) {
        detail::check_keys(section, "noise (preset " + preset + ")", allowed);
    };
    if (preset == "zero") {
        only({"preset"});
        return zero_noise(reg);
    }
    if (preset == "paper-like") {
        only({"preset"});
        return reference_device_noise(reg);
    }
    if (preset == "custom") {
        only({"preset", "patterns", "jitter_sigma"});
        PatternMixture mixture;
        mixture.jitter_sigma = section.value("jitter_sigma", 0.0);
        for (const auto &p : section.at("patterns")) {
            detail::check_keys(p, "noise.patterns[]", {"weight", "qubits"});
            WeightedPattern wp;
            wp.weight = p.value("weight", 1.0);
            for (const auto &[label, q] : p.at("qubits").items()) {
                if (!reg.contains(label)) {
                    throw invalid_input("noise pattern names unknown qubit '" + label + "'");
                }
                wp.params.qubits[label] = detail::confusion_from_json(q, "noise.patterns[].qubits." + label);
            }
            mixture.patterns.push_back(std::move(wp));
        }
        mixture.validate(reg);
        return mixture;
    }
    if (preset == "iq") {
        only({"preset", "qubits", "threshold_rule"});
        IqModel model;
        std::string rule = section.value("threshold_rule", std::string("intersection"));
        if (rule == "intersection") {
            model.rule = ThresholdRule::intersection;
        } else if (rule == "midpoint") {
            model.rule = ThresholdRule::midpoint;
        } else {
            throw invalid_input("unknown threshold_rule '" + rule + "'");
        }
        for (const auto &[label, q] : section.at("qubits").items()) {
            if (!reg.contains(label)) {
                throw invalid_input("I-Q model names unknown qubit '" + label + "'");
            }
            detail::check_keys(q, "noise.qubits." + label, {"ground", "excited"});
            model.qubits[label] = IqQubit{
                detail::blob_from_json(q.at("ground"), "noise.qubits." + label + ".ground"),
                detail::blob_from_json(q.at("excited"), "noise.qubits." + label + ".excited"),
            };
        }
        for (const auto &label : reg.labels()) {
            model.at(label);
        }
        return model;
    }
    throw invalid_input("unknown noise preset '" + preset + "'");
}

inline ToolConfig parse_config(const json &doc) {
    ToolConfig cfg;
    try {
        detail::check_keys(
            doc, "", {"seed", "register", "noise", "fcm", "calibration", "benchmark", "io", "conventions"});
        detail::read_key(doc, "seed", cfg.seed);

        if (doc.contains("register")) {
            const json &s = doc.at("register");
            detail::check_keys(s, "register", {"labels"});
            detail::read_key(s, "labels", cfg.labels);
        }
        RegisterSpec reg = cfg.register_spec();

        if (doc.contains("noise")) {
            cfg.noise = doc.at("noise");
        }
        noise_from_json(cfg.noise, reg);

        if (doc.contains("fcm")) {
            const json &s = doc.at("fcm");
            detail::check_keys(s, "fcm", {"m", "maxiter", "phi", "c_candidates", "seed"});
            detail::read_key(s, "m", cfg.fcm.fuzzifier);
            detail::read_key(s, "maxiter", cfg.fcm.max_iter);
            detail::read_key(s, "phi", cfg.fcm.tolerance);
            detail::read_key(s, "c_candidates", cfg.fcm.c_candidates);
            if (s.contains("seed") && !s.at("seed").is_null()) {
                cfg.fcm_seed = s.at("seed").get<std::uint64_t>();
            }
        }
        cfg.fcm.validate();

        if (doc.contains("calibration")) {
            const json &s = doc.at("calibration");
            detail::check_keys(s, "calibration", {"t", "shots", "source"});
            detail::read_key(s, "t", cfg.calibration_t);
            detail::read_key(s, "shots", cfg.calibration_shots);
            detail::read_key(s, "source", cfg.calibration_source);
        }

        if (doc.contains("benchmark")) {
            const json &s = doc.at("benchmark");
            detail::check_keys(
                s, "benchmark",
                {"circuits", "initial_states", "repetitions", "shots", "calibration", "recalibrate_per_repetition"});
            detail::read_key(s, "circuits", cfg.circuits);
            if (s.contains("initial_states")) {
                const json &st = s.at("initial_states");
                if (st.is_string()) {
                    if (st.get<std::string>() != "all") {
                        throw invalid_input("benchmark.initial_states must be \"all\" or a list of basis labels");
                    }
                    cfg.initial_states.clear();
                } else {
                    cfg.initial_states = st.get<std::vector<std::string>>();
                }
            }
            detail::read_key(s, "repetitions", cfg.repetitions);
            detail::read_key(s, "shots", cfg.bench_shots);
            detail::read_key(s, "calibration", cfg.bench_calibration);
            detail::read_key(s, "recalibrate_per_repetition", cfg.recalibrate_per_repetition);
            if (cfg.bench_calibration != "fresh" && cfg.bench_calibration.rfind("reuse:", 0) != 0) {
                throw invalid_input("benchmark.calibration must be \"fresh\" or \"reuse:<path>\"");
            }
        }
        for (const auto &s : cfg.initial_states) {
            reg.basis_index(s);
        }

        if (doc.contains("io")) {
            const json &s = doc.at("io");
            detail::check_keys(s, "io", {"output_dir", "formats"});
            detail::read_key(s, "output_dir", cfg.output_dir);
            detail::read_key(s, "formats", cfg.formats);
        }
        for (const auto &f : cfg.formats) {
            if (f != "csv" && f != "plot" && f != "table" && f != "stability") {
                throw invalid_input("unknown output format '" + f + "'");
            }
        }

        if (doc.contains("conventions")) {
            const json &s = doc.at("conventions");
            detail::check_keys(s, "conventions", {"hellinger", "negativity", "inversion", "condition_cap"});
            if (s.contains("hellinger")) {
                cfg.hellinger = parse_hellinger_convention(s.at("hellinger").get<std::string>());
            }
            if (s.contains("negativity")) {
                cfg.negativity = parse_negativity_policy(s.at("negativity").get<std::string>());
            }
            if (s.contains("inversion")) {
                std::string mode = s.at("inversion").get<std::string>();
                if (mode == "exact") {
                    cfg.inversion.mode = InversionPolicy::Mode::exact;
                } else if (mode == "least_squares") {
                    cfg.inversion.mode = InversionPolicy::Mode::least_squares;
                } else {
                    throw invalid_input("unknown inversion policy '" + mode + "'");
                }
            }
            detail::read_key(s, "condition_cap", cfg.inversion.condition_cap);
            if (!(cfg.inversion.condition_cap > 1.0)) {
                throw invalid_input("conventions.condition_cap must exceed 1");
            }
        }
    } catch (const json::exception &e) {
        throw invalid_input(std::string("config: ") + e.what());
    }
    return cfg;
}

/// Effective configuration with every default filled in. parse_config
/// accepts it and yields the same ToolConfig.
inline json config_to_json(const ToolConfig &cfg) {
    json fcm = fcm_config_to_json(cfg.fcm);
    fcm["seed"] = cfg.fcm_seed ? json(*cfg.fcm_seed) : json(nullptr);
    return json{
        {"seed", cfg.seed},
        {"register", {{"labels", cfg.labels}}},
        {"noise", cfg.noise},
        {"fcm", fcm},
        {"calibration", {{"t", cfg.calibration_t}, {"shots", cfg.calibration_shots}, {"source", cfg.calibration_source}}},
        {"benchmark",
         {
             {"circuits", cfg.circuits},
             {"initial_states", cfg.initial_states.empty() ? json("all") : json(cfg.initial_states)},
             {"repetitions", cfg.repetitions},
             {"shots", cfg.bench_shots},
             {"calibration", cfg.bench_calibration},
             {"recalibrate_per_repetition", cfg.recalibrate_per_repetition},
         }},
        {"io", {{"output_dir", cfg.output_dir}, {"formats", cfg.formats}}},
        {"conventions",
         {
             {"hellinger", to_string(cfg.hellinger)},
             {"negativity", to_string(cfg.negativity)},
             {"inversion", cfg.inversion.mode == InversionPolicy::Mode::exact ? "exact" : "least_squares"},
             {"condition_cap", cfg.inversion.condition_cap},
         }},
    };
}

/// Applies "a.b.c=value" to a raw config document. The value is read as JSON
/// when it parses, otherwise as a string.
inline void apply_override(json &doc, const std::string &assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw invalid_input("override '" + assignment + "' is not of the form key=value");
    }
    std::string path = assignment.substr(0, eq);
    std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    json *node = &doc;
    std::stringstream parts(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(parts, key, '.')) {
        if (key.empty()) {
            throw invalid_input("override '" + assignment + "' has an empty key segment");
        }
        keys.push_back(key);
    }
    for (std::size_t k = 0; k + 1 < keys.size(); k++) {
        if (!node->is_object()) {
            throw invalid_input("override '" + assignment + "' descends into a non-object");
        }
        node = &(*node)[keys[k]];
        if (node->is_null()) {
            *node = json::object();
        }
    }
    if (!node->is_object()) {
        throw invalid_input("override '" + assignment + "' descends into a non-object");
    }
    (*node)[keys.back()] = std::move(value);
}

inline json read_json_file(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw invalid_input("cannot open '" + path.string() + "'");
    }
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) {
        throw invalid_input("'" + path.string() + "' is not valid JSON");
    }
    return j;
}

/// Resolves a circuit entry: a built-in validation circuit name or a path to
/// a circuit JSON file.
inline Circuit resolve_circuit(const std::string &entry, const RegisterSpec &reg) {
    if (entry.size() > 5 && entry.compare(entry.size() - 5, 5, ".json") == 0) {
        return circuit_from_json(read_json_file(entry));
    }
    if (reg.n_qubits() == 2) {
        for (auto &c : validation_circuits(reg)) {
            if (c.name() == entry) {
                return c;
            }
        }
    }
    throw invalid_input("unknown circuit '" + entry + "'");
}

/// Benchmark plan described by a parsed config. A "reuse:<path>" calibration
/// is loaded from disk.
inline BenchmarkPlan plan_from_config(const ToolConfig &cfg) {
    RegisterSpec reg = cfg.register_spec();
    BenchmarkPlan plan{
        reg, {}, cfg.initial_states, cfg.repetitions, cfg.bench_shots, noise_from_json(cfg.noise, reg),
        cfg.calibration_t, cfg.calibration_shots, cfg.effective_fcm(), std::nullopt,
        cfg.recalibrate_per_repetition, cfg.negativity, cfg.hellinger, cfg.inversion, cfg.seed};
    for (const auto &c : cfg.circuits) {
        plan.circuits.push_back(resolve_circuit(c, reg));
    }
    if (plan.initial_states.empty()) {
        for (std::size_t b = 0; b < reg.dimension(); b++) {
            plan.initial_states.push_back(reg.basis_label(b));
        }
    }
    if (cfg.bench_calibration != "fresh") {
        plan.reuse_calibration = calibration_from_artifact(read_json_file(cfg.bench_calibration.substr(6)));
    }
    return plan;
}

}  // namespace fcmqem
