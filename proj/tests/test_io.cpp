#include "doctest.h"

#include <stdexcept>

#include <filesystem>

#include "cma/experiment.hpp"
#include "cma/io.hpp"

using namespace cma;

namespace {
const ModelSpec kDefaults = default_model_spec();
}

TEST_CASE("model spec JSON round-trips") {
    const std::string text = to_json(kDefaults);
    const ModelSpec back = model_spec_from_json(text);
    CHECK(to_json(back) == text);
    CHECK(back.motor_margin.prob("MM1|SF|NoOp", "MM0") == 0.002809);
    CHECK(back.motor_health.prob("NF", "SF") == 0.0000475);
    CHECK(back.weights.w_absorbing[0] == 0.163);
    CHECK(back.weights.w_action[2] == 0.02);
}

TEST_CASE("value function JSON round-trips") {
    const CmaModel model = build_cma_model(kDefaults);
    const ValueFunction vf = value_iteration(model);
    const ValueFunction back = value_function_from_json(to_json(vf));
    CHECK(back.v == vf.v);
    CHECK(back.q == vf.q);
    CHECK(back.policy == vf.policy);
    CHECK(back.discount == vf.discount);
}

TEST_CASE("alpha set JSON round-trips") {
    const CmaModel model = build_cma_model(kDefaults);
    const ValueFunction vf = value_iteration(model);
    const AlphaSet set = qmdp_alphas(vf, model.legality);
    double p_obs = 0.0;
    const AlphaSet back = alpha_set_from_json(to_json(set, 0.8), &p_obs);
    CHECK(p_obs == 0.8);
    REQUIRE(back.alphas.size() == set.alphas.size());
    for (std::size_t i = 0; i < set.alphas.size(); ++i) {
        CHECK(back.alphas[i].action == set.alphas[i].action);
        CHECK(back.alphas[i].values == set.alphas[i].values);
    }
}

TEST_CASE("malformed model files name the offending key") {
    CHECK_THROWS_WITH_AS(model_spec_from_json("{}"), doctest::Contains("factors"),
                         std::invalid_argument);
    try {
        model_spec_from_json(R"({"factors": {"flight_status": {"child": "fs"}}})");
        FAIL("expected error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("flight_status") != std::string::npos);
    }
}

TEST_CASE("CSV quoting follows RFC 4180") {
    CHECK(CsvWriter::escape("plain") == "plain");
    CHECK(CsvWriter::escape("a,b") == "\"a,b\"");
    CHECK(CsvWriter::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(CsvWriter::escape("line\nbreak") == "\"line\nbreak\"");

    CsvWriter csv({"a", "b"});
    csv.add_row({"1", "x,y"});
    CHECK(csv.str() == "a,b\r\n1,\"x,y\"\r\n");
    CHECK_THROWS_AS(csv.add_row({"only-one"}), std::invalid_argument);
}

TEST_CASE("experiment spec JSON honors defaults and overrides") {
    const ExperimentSpec defaults;
    CHECK(defaults.p_obs_grid == std::vector<double>{1.0, 0.9, 0.8, 0.6});
    CHECK(defaults.n_episodes == 5000);

    const ExperimentSpec spec = experiment_spec_from_json(
        R"({"episodes": 10, "bh": ["P"], "policies": ["noop", "pomdp"], "p_obs": [0.8]})");
    CHECK(spec.n_episodes == 10);
    CHECK(spec.bh_grid == std::vector<BatteryHealth>{BatteryHealth::Poor});
    CHECK(spec.policies.size() == 2);
    CHECK_THROWS(experiment_spec_from_json(R"({"p_obs": [0.4]})"));
}

TEST_CASE("default model file ships in sync with the embedded defaults") {
    // data/default_model.json is the versioned export of the embedded tables;
    // any drift between them is an error.
    const auto path = std::filesystem::path(PROJECT_SOURCE_DIR) / "data" / "default_model.json";
    REQUIRE(std::filesystem::exists(path));
    CHECK(read_file(path.string()) == to_json(kDefaults));
}
