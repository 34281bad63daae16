#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "survbma/config.hpp"
#include "survbma/errors.hpp"

using namespace survbma;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("prior tagged records parse", "[config]") {
    const auto tn = parse_prior(R"({"kind":"normal","mu":0.3,"sigma":0.15,"lower":0})");
    CHECK(tn.kind() == PriorKind::TruncatedNormal);
    CHECK(tn.param1() == 0.3);
    CHECK(tn.param2() == 0.15);
    CHECK(tn.lower_bound() == 0.0);
    CHECK(tn.upper_bound() == kInf);

    CHECK(parse_prior(R"({"kind":"normal","mu":0,"sigma":1})").kind() == PriorKind::Normal);
    CHECK(parse_prior(R"({"kind":"lognormal","mu_log":0.62,"sigma_log":0.25})").kind() ==
          PriorKind::LogNormal);
    CHECK(parse_prior(R"({"kind":"cauchy","location":0,"scale":100})").kind() ==
          PriorKind::Cauchy);
    CHECK(parse_prior(R"({"kind":"halfcauchy","scale":10})").kind() == PriorKind::HalfCauchy);
    CHECK(parse_prior(R"({"kind":"spike","value":0})").is_spike());

    CHECK_THROWS_AS(parse_prior(R"({"kind":"uniform","a":0,"b":1})"), ConfigError);
    CHECK_THROWS_AS(parse_prior(R"({"kind":"normal","mu":0})"), ConfigError);
    CHECK_THROWS_AS(parse_prior(R"({"kind":"normal","mu":0,"sigma":1,"extra":2})"), ConfigError);
    CHECK_THROWS_AS(parse_prior(R"(not json)"), ConfigError);
}

TEST_CASE("default configs parse into the default model sets", "[config]") {
    for (EnsembleMode mode : {EnsembleMode::Estimation, EnsembleMode::Testing}) {
        const auto cfg = parse_config(default_config_json(mode));
        REQUIRE(cfg.mode.has_value());
        CHECK(*cfg.mode == mode);
        const auto expected =
            mode == EnsembleMode::Estimation ? default_estimation_models() : default_testing_models();
        REQUIRE(cfg.models.size() == expected.size());
        for (std::size_t m = 0; m < expected.size(); ++m) {
            CHECK(cfg.models[m].family == expected[m].family);
            CHECK(cfg.models[m].beta == expected[m].beta);
            CHECK(cfg.models[m].alpha == expected[m].alpha);
            CHECK(cfg.models[m].gamma == expected[m].gamma);
            CHECK_THAT(cfg.models[m].weight, WithinRel(expected[m].weight, 1e-12));
        }
    }
}

TEST_CASE("unknown keys are rejected everywhere", "[config]") {
    CHECK_THROWS_AS(parse_config(R"({"surprise": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sampler": {"chains": 2, "typo": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"thresholds": {"bf10_upper": 3, "bf01": 3}})"), ConfigError);
}

TEST_CASE("testing mode requires paired spike and free beta models", "[config]") {
    // Drop one of the exponential pair from the default testing config.
    auto models = default_testing_models();
    models.erase(models.begin());  // removes the exponential spike model
    for (auto& m : models) m.weight = 1.0 / 9.0;
    CHECK_THROWS_AS(validate_mode_models(EnsembleMode::Testing, models), ConfigError);
    CHECK_NOTHROW(validate_mode_models(EnsembleMode::Testing, default_testing_models()));
    CHECK_NOTHROW(validate_mode_models(EnsembleMode::Estimation, default_estimation_models()));
    CHECK_THROWS_AS(validate_mode_models(EnsembleMode::Estimation, default_testing_models()),
                    ConfigError);
}

TEST_CASE("weights must sum to one", "[config]") {
    auto models = default_estimation_models();
    models[0].weight = 0.5;
    std::string json = R"({"models": [)";
    // Hand-build a two-model config with bad weights.
    json = R"({
      "models": [
        {"family":"exponential","beta":{"kind":"normal","mu":0,"sigma":1},
         "alpha":{"kind":"normal","mu":8.7,"sigma":2.0},"weight":0.6},
        {"family":"weibull","beta":{"kind":"normal","mu":0,"sigma":1},
         "alpha":{"kind":"normal","mu":8.8,"sigma":2.2},
         "gamma":{"kind":"lognormal","mu_log":0,"sigma_log":0.3},"weight":0.6}
      ]
    })";
    CHECK_THROWS_AS(parse_config(json), ConfigError);
}

TEST_CASE("gamma prior presence must match the family", "[config]") {
    const std::string json = R"({
      "models": [
        {"family":"exponential","beta":{"kind":"normal","mu":0,"sigma":1},
         "alpha":{"kind":"normal","mu":8.7,"sigma":2.0},
         "gamma":{"kind":"lognormal","mu_log":0,"sigma_log":0.3},"weight":1.0}
      ]
    })";
    CHECK_THROWS_AS(parse_config(json), ConfigError);
}

TEST_CASE("sections parse", "[config]") {
    const std::string json = R"({
      "seed": 7,
      "sampler": {"chains": 2, "burnin": 100, "samples": 500},
      "thresholds": {"bf10_upper": 6.9, "bf01_upper": 4.4},
      "schedule": {"interval_days": 30, "horizon_days": 1825},
      "bfda": {"n_participants": 200, "replications": 10, "design": "sequential",
               "censoring": {"shape": 1.5, "scale": 2250, "cutoff_days": 1825},
               "alpha": 0.05, "beta": 0.1, "leave_one_family_out": true},
      "simulate": {"n_participants": 50, "hypothesis": "h1",
                   "censoring": {"shape": 1.5, "scale": "none", "cutoff_days": 1825}},
      "map_prior": {"historical_data": ["a.csv", "b.csv"], "families": ["weibull"],
                    "tau_fixed_zero": true},
      "curve_grid": {"from_days": 30, "to_days": 1800, "points": 25}
    })";
    const auto cfg = parse_config(json);
    CHECK(cfg.seed == 7);
    CHECK(cfg.sampler.burnin == 100);
    REQUIRE(cfg.thresholds.has_value());
    CHECK(cfg.thresholds->bf10_upper == 6.9);
    REQUIRE(cfg.schedule.has_value());
    CHECK(cfg.schedule->horizon_days == 1825.0);
    REQUIRE(cfg.bfda.has_value());
    CHECK(cfg.bfda->design == DesignKind::Sequential);
    CHECK(cfg.bfda->leave_one_family_out);
    REQUIRE(cfg.simulate.has_value());
    CHECK(cfg.simulate->censoring.scale == kInf);
    REQUIRE(cfg.map_prior.has_value());
    CHECK(cfg.map_prior->families == std::vector<Family>{Family::Weibull});
    CHECK(cfg.map_prior->tau_fixed_zero);
    REQUIRE(cfg.curve_grid.has_value());
    CHECK(cfg.curve_grid->points == 25);
}

TEST_CASE("generating models split by hypothesis with renormalized weights", "[config]") {
    AnalysisConfig cfg;
    cfg.models = default_testing_models();
    const auto h0 = cfg.generating_models(Hypothesis::H0);
    const auto h1 = cfg.generating_models(Hypothesis::H1);
    REQUIRE(h0.size() == 5);
    REQUIRE(h1.size() == 5);
    double w0 = 0.0, w1 = 0.0;
    for (const auto& m : h0) {
        CHECK(m.beta.is_spike());
        w0 += m.weight;
    }
    for (const auto& m : h1) {
        CHECK(!m.beta.is_spike());
        w1 += m.weight;
    }
    CHECK_THAT(w0, WithinRel(1.0, 1e-12));
    CHECK_THAT(w1, WithinRel(1.0, 1e-12));

    AnalysisConfig estimation;
    estimation.models = default_estimation_models();
    CHECK_THROWS_AS(estimation.generating_models(Hypothesis::H0), ConfigError);
}

TEST_CASE("shipped config files match the built-in defaults", "[config]") {
    for (const char* name : {"estimation", "testing"}) {
        const std::string path = std::string(TEST_CONFIG_DIR "/") + name + ".json";
        const auto cfg = load_config(path);
        REQUIRE(cfg.mode.has_value());
        const auto expected = (*cfg.mode == EnsembleMode::Estimation)
                                  ? default_estimation_models()
                                  : default_testing_models();
        REQUIRE(cfg.models.size() == expected.size());
        for (std::size_t m = 0; m < expected.size(); ++m) {
            CHECK(cfg.models[m].beta == expected[m].beta);
            CHECK(cfg.models[m].alpha == expected[m].alpha);
            CHECK(cfg.models[m].gamma == expected[m].gamma);
        }
    }
}
