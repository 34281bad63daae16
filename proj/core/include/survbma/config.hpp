#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survbma/bfda.hpp"
#include "survbma/ensemble.hpp"
#include "survbma/sequential.hpp"

namespace survbma {

enum class EnsembleMode { Estimation, Testing };

struct BfdaSection {
    int n_participants = 0;
    int replications = 0;
    DesignKind design = DesignKind::FixedN;
    CensoringSpec censoring;
    double alpha = 0.05;
    double beta = 0.10;
    bool leave_one_family_out = false;
    bool truncate_bf = true;  // sequential BFDA speed-up, range [1/15, 15]
};

struct SimulateSection {
    int n_participants = 0;
    Hypothesis hypothesis = Hypothesis::H1;
    int replication = 0;
    CensoringSpec censoring;
};

struct MapPriorSection {
    std::vector<std::string> historical_data;
    std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
    bool tau_fixed_zero = false;
};

struct CurveGridSection {
    double from_days = 0.0;
    double to_days = 0.0;
    int points = 0;
};

/// Parsed analysis configuration. Sections are optional; each subcommand
/// checks for the ones it needs. Parsing is strict: unknown keys anywhere
/// are a ConfigError, so an invalid file never produces partial output.
struct AnalysisConfig {
    std::optional<EnsembleMode> mode;
    std::vector<ModelSpec> models;
    SamplerSettings sampler;
    std::uint64_t seed = 1;
    std::optional<DecisionThresholds> thresholds;
    std::optional<LookSchedule> schedule;
    std::optional<BfdaSection> bfda;
    std::optional<SimulateSection> simulate;
    std::optional<MapPriorSection> map_prior;
    std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
    std::optional<CurveGridSection> curve_grid;

    EnsembleConfig ensemble() const;

    /// Effect (free-beta) or null (spike-beta) subset with weights
    /// renormalized to 1; used as BFDA generating ensembles.
    std::vector<ModelSpec> generating_models(Hypothesis hypothesis) const;
};

AnalysisConfig load_config(const std::string& path);
AnalysisConfig parse_config(const std::string& json_text);

/// Parse one prior from its tagged-record form, e.g.
/// {"kind":"normal","mu":0.3,"sigma":0.15,"lower":0}.
PriorSpec parse_prior(const std::string& json_text);

/// Ensemble sanity for a mode: estimation has only free-beta models; testing
/// pairs every family with both a spike-beta and a free-beta variant.
void validate_mode_models(EnsembleMode mode, const std::vector<ModelSpec>& models);

/// Default model sets with the historical-data intercept/shape priors:
/// estimation: 5 models, beta ~ Normal(0,1), weights 1/5;
/// testing: 10 models, Spike(0) vs Normal(0.3, 0.15) truncated to [0, inf),
/// weights 1/10.
std::vector<ModelSpec> default_estimation_models();
std::vector<ModelSpec> default_testing_models();

/// Serialized config text for the shipped defaults.
std::string default_config_json(EnsembleMode mode);

}  // namespace survbma
