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

#include "fcmqem/config.hpp"
#include "gtest/gtest.h"

using namespace fcmqem;

namespace {

const std::string kData = FCMQEM_DATA_DIR;

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
    ToolConfig cfg = parse_config(json::object());
    EXPECT_EQ(cfg.seed, 0u);
    EXPECT_EQ(cfg.labels, (std::vector<std::string>{"Q0", "Q2"}));
    EXPECT_EQ(cfg.calibration_t, 10u);
    EXPECT_EQ(cfg.calibration_shots, 760u);
    EXPECT_EQ(cfg.repetitions, 5u);
    EXPECT_EQ(cfg.bench_shots, 760u);
    EXPECT_EQ(cfg.circuits.size(), 4u);
    EXPECT_EQ(cfg.hellinger, HellingerConvention::standard);
    EXPECT_EQ(cfg.negativity, NegativityPolicy::clip_renormalize);
    EXPECT_EQ(cfg.effective_fcm().seed, derive_seed(0, {fcm_stream}));
}

TEST(Config, UnknownKeysAreRejected) {
    EXPECT_THROW(parse_config(json{{"sed", 1}}), Error);
    EXPECT_THROW(parse_config(json{{"fcm", {{"mm", 2}}}}), Error);
    EXPECT_THROW(parse_config(json{{"benchmark", {{"shots", 1}, {"extra", true}}}}), Error);
    EXPECT_THROW(parse_config(json{{"noise", {{"preset", "zero"}, {"jitter_sigma", 0.1}}}}), Error);
    EXPECT_THROW(parse_config(json{{"seed", "zero"}}), Error);
}

TEST(Config, SemanticValidation) {
    EXPECT_THROW(parse_config(json{{"fcm", {{"m", 1.0}}}}), Error);
    EXPECT_THROW(parse_config(json{{"benchmark", {{"initial_states", {"00", "0x"}}}}}), Error);
    EXPECT_THROW(parse_config(json{{"benchmark", {{"initial_states", "some"}}}}), Error);
    EXPECT_THROW(parse_config(json{{"benchmark", {{"calibration", "cached"}}}}), Error);
    EXPECT_THROW(parse_config(json{{"io", {{"formats", {"xml"}}}}}), Error);
    EXPECT_THROW(parse_config(json{{"conventions", {{"inversion", "pinv"}}}}), Error);
    EXPECT_THROW(parse_config(json{{"conventions", {{"condition_cap", 0.5}}}}), Error);
    EXPECT_THROW(parse_config(json{{"noise", {{"preset", "bogus"}}}}), Error);
}

TEST(Config, EffectiveConfigRoundTrips) {
    json doc{
        {"seed", 42},
        {"fcm", {{"m", 2.5}, {"seed", 5}}},
        {"calibration", {{"t", 12}}},
        {"benchmark", {{"circuits", {"cnot"}}, {"initial_states", {"01", "11"}}, {"recalibrate_per_repetition", true}}},
        {"conventions", {{"hellinger", "half_prefactor"}, {"negativity", "simplex_projection"}, {"inversion", "least_squares"}}},
    };
    ToolConfig cfg = parse_config(doc);
    json effective = config_to_json(cfg);
    EXPECT_EQ(config_to_json(parse_config(effective)), effective);
    EXPECT_EQ(cfg.effective_fcm().seed, 5u);
    EXPECT_EQ(effective.at("fcm").at("m"), 2.5);
    EXPECT_EQ(effective.at("benchmark").at("initial_states"), json({"01", "11"}));

    json defaults = config_to_json(parse_config(json::object()));
    EXPECT_TRUE(defaults.at("fcm").at("seed").is_null());
    EXPECT_EQ(defaults.at("benchmark").at("initial_states"), "all");
    EXPECT_EQ(config_to_json(parse_config(defaults)), defaults);
}

TEST(Config, Overrides) {
    json doc = json::object();
    apply_override(doc, "fcm.maxiter=25");
    apply_override(doc, "noise.preset=zero");
    apply_override(doc, "benchmark.circuits=[\"cnot\"]");
    EXPECT_EQ(doc.at("fcm").at("maxiter"), 25);
    EXPECT_EQ(doc.at("noise").at("preset"), "zero");
    ToolConfig cfg = parse_config(doc);
    EXPECT_EQ(cfg.fcm.max_iter, 25);
    EXPECT_EQ(cfg.circuits, (std::vector<std::string>{"cnot"}));
    EXPECT_THROW(apply_override(doc, "novalue"), Error);
    EXPECT_THROW(apply_override(doc, "a..b=1"), Error);
    EXPECT_THROW(apply_override(doc, "fcm.maxiter.x=1"), Error);
}

TEST(Noise, Presets) {
    RegisterSpec reg({"Q0", "Q2"});
    NoiseModel zero = noise_from_json(json{{"preset", "zero"}}, reg);
    ASSERT_TRUE(std::holds_alternative<PatternMixture>(zero));
    EXPECT_EQ(expected_confusion(std::get<PatternMixture>(zero), reg), Matrix::identity(4));

    NoiseModel like = noise_from_json(json{{"preset", "paper-like"}}, reg);
    NoiseModel file = noise_from_json(read_json_file(kData + "/reference_device_noise.json").at("noise"), reg);
    EXPECT_EQ(expected_confusion(std::get<PatternMixture>(like), reg),
              expected_confusion(std::get<PatternMixture>(file), reg));

    json iq = {
        {"preset", "iq"},
        {"threshold_rule", "midpoint"},
        {"qubits",
         {{"Q0", {{"ground", {{"mean", {0, 0}}, {"sigma", 1}}}, {"excited", {{"mean", {3, 0}}, {"sigma", 1}}}}},
          {"Q2", {{"ground", {{"mean", {0, 0}}, {"sigma", 1}}}, {"excited", {{"mean", {0, 4}}, {"sigma", 1}}}}}}},
    };
    NoiseModel m = noise_from_json(iq, reg);
    ASSERT_TRUE(std::holds_alternative<IqModel>(m));
    EXPECT_DOUBLE_EQ(iq_threshold(std::get<IqModel>(m), "Q2"), 2.0);
    iq["qubits"].erase("Q2");
    EXPECT_THROW(noise_from_json(iq, reg), Error);

    json custom = {{"preset", "custom"}, {"patterns", {{{"weight", 1.0}, {"qubits", {{"Q0", {{"p01", 0.1}, {"p10", 0.2}}}}}}}}};
    EXPECT_THROW(noise_from_json(custom, reg), Error);
    custom["patterns"][0]["qubits"]["Q2"] = {{"p01", 0.0}, {"p10", 0.0}};
    EXPECT_NO_THROW(noise_from_json(custom, reg));
    custom["patterns"][0]["qubits"]["Q9"] = {{"p01", 0.0}, {"p10", 0.0}};
    EXPECT_THROW(noise_from_json(custom, reg), Error);
}

TEST(Config, BenchFixtureBuildsDefaultPlan) {
    json doc = read_json_file(kData + "/bench_config.json");
    for (auto &c : doc["benchmark"]["circuits"]) {
        c = kData + "/" + c.get<std::string>().substr(5);
    }
    BenchmarkPlan plan = plan_from_config(parse_config(doc));
    BenchmarkPlan reference = default_plan(RegisterSpec({"Q0", "Q2"}), reference_device_noise(RegisterSpec({"Q0", "Q2"})), 0);
    EXPECT_EQ(plan.initial_states, reference.initial_states);
    EXPECT_EQ(plan.fcm.seed, reference.fcm.seed);
    ASSERT_EQ(plan.circuits.size(), 4u);
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_EQ(plan.circuits[k].name(), reference.circuits[k].name());
    }
    EXPECT_THROW(resolve_circuit("toffoli", plan.reg), Error);
}
