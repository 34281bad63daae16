#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survbma/ensemble.hpp"
#include "survbma/sequential.hpp"

namespace survbma {

/// Weibull censoring process plus an administrative cutoff. A non-finite
/// scale disables process censoring; the cutoff always applies.
struct CensoringSpec {
    double shape = 1.0;
    double scale = 0.0;        // days; +inf = none
    double cutoff_days = 0.0;  // administrative truncation

    void validate() const;
};

enum class Hypothesis { H0, H1 };
enum class DesignKind { FixedN, Sequential };

struct BfdaScenario {
    std::vector<ModelSpec> generating;  // weighted data-generating ensemble
    Hypothesis hypothesis = Hypothesis::H0;
    int n_participants = 0;
    CensoringSpec censoring;
    int replications = 0;
    DesignKind design = DesignKind::FixedN;
    LookSchedule schedule;  // sequential designs only
    std::uint64_t master_seed = 0;

    void validate() const;
};

/// Simulated trial for one replication: a generating model is drawn by
/// weight, its parameters from the priors (spikes fixed), survival times per
/// arm (1:1 allocation), Weibull censoring, administrative cutoff.
/// Deterministic per (master_seed, replication_index).
SurvivalData simulate_trial(const BfdaScenario& scenario, int replication_index);

/// Which family generated a given replication (same draw path as
/// simulate_trial).
Family generating_family(const BfdaScenario& scenario, int replication_index);

struct BfdaAnalysisConfig {
    EnsembleConfig analysis;  // the testing ensemble
    bool leave_one_family_out = false;
    std::optional<BfTruncation> truncation;  // sequential designs
    int n_threads = 1;
};

struct BfdaReplication {
    int index = 0;
    std::uint64_t seed = 0;
    Family generating = Family::Exponential;
    double bf10 = 1.0;  // final inclusion BF (fixed-n) or last recorded (sequential)
    // Fixed-n only: model-averaged treatment effect over the effect models.
    double beta_mean = 0.0;
    double beta_lower = 0.0;
    double beta_upper = 0.0;
    // Sequential only.
    EvidenceTrajectory trajectory;
};

struct BfdaResult {
    DesignKind design = DesignKind::FixedN;
    std::vector<BfdaReplication> h0;
    std::vector<BfdaReplication> h1;
    int failures_h0 = 0;
    int failures_h1 = 0;

    std::vector<double> bf_samples(Hypothesis h) const;
};

/// Runs the full analysis for every replication under both scenarios.
/// Sequential replications run without stopping thresholds, recording full
/// trajectories (optionally truncated outside [1/15, 15]).
BfdaResult run_bfda(const BfdaScenario& scenario_h0, const BfdaScenario& scenario_h1,
                    const BfdaAnalysisConfig& config);

struct CalibrationResult {
    double bf10_threshold = 1.0;
    double bf01_threshold = 1.0;
    double achieved_false_positive = 0.0;
    double achieved_false_positive_se = 0.0;
    double achieved_false_negative = 0.0;
    double achieved_false_negative_se = 0.0;
};

/// Lower nearest-rank quantile: smallest element with rank >= ceil(q * n).
double nearest_rank_quantile(std::vector<double> samples, double q);

/// Fixed-n calibration: BF10 threshold at the (1 - alpha) quantile under H0;
/// BF01 threshold as the reciprocal of the beta quantile under H1.
CalibrationResult calibrate_fixed(const std::vector<double>& bf_h0,
                                  const std::vector<double>& bf_h1, double alpha, double beta);

/// Decision for one trajectory at given thresholds: first crossing wins.
struct TrajectoryDecision {
    Decision decision = Decision::Undecided;
    double time = 0.0;
};
TrajectoryDecision decide_trajectory(const EvidenceTrajectory& traj,
                                     const DecisionThresholds& thresholds);

/// Sequential calibration: fixed-point search over a geometric grid (1.1^j)
/// for the smallest boundary pair with H0 upward-crossing rate <= alpha and
/// H1 downward-crossing rate <= beta.
CalibrationResult calibrate_sequential(const std::vector<EvidenceTrajectory>& trajectories_h0,
                                       const std::vector<EvidenceTrajectory>& trajectories_h1,
                                       double alpha, double beta,
                                       double grid_cap = 1000.0);

struct DesignMetrics {
    double error_rate = 0.0;
    double error_rate_se = 0.0;
    double power = 0.0;  // probability of deciding the true hypothesis
    double power_se = 0.0;
    double undecided_fraction = 0.0;
    double undecided_fraction_se = 0.0;
    std::optional<double> mean_decision_time;
    std::optional<double> mean_decision_time_se;
};

DesignMetrics evaluate_design(const std::vector<TrajectoryDecision>& decisions, Hypothesis truth);

struct EstimatorMetrics {
    double bias = 0.0;
    double bias_se = 0.0;
    double rmse = 0.0;
    double rmse_se = 0.0;  // jackknife
    double coverage = 0.0;
    double coverage_se = 0.0;
};

/// Bias, RMSE (with jackknife SE), and CI coverage for aligned estimate /
/// truth / interval lists.
EstimatorMetrics estimator_metrics(const std::vector<double>& estimates,
                                   const std::vector<double>& truths,
                                   const std::vector<double>& ci_lower,
                                   const std::vector<double>& ci_upper);

}  // namespace survbma
