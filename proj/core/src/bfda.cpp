#include "survbma/bfda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/threading.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kAnalysisTag = 0xA11;

struct GeneratingDraw {
    std::size_t model_index;
    ParamVector params;
};

GeneratingDraw draw_generating_model(const BfdaScenario& scenario, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t pick = scenario.generating.size() - 1;
    for (std::size_t m = 0; m < scenario.generating.size(); ++m) {
        acc += scenario.generating[m].weight;
        if (u <= acc) {
            pick = m;
            break;
        }
    }
    const ModelSpec& model = scenario.generating[pick];
    ParamVector p;
    p.beta = model.beta.sample(rng);
    p.alpha = model.alpha.sample(rng);
    if (model.gamma.has_value()) p.gamma = model.gamma->sample(rng);
    return {pick, p};
}

}  // namespace

void CensoringSpec::validate() const {
    if (!(cutoff_days > 0.0)) throw ConfigError("censoring cutoff must be positive");
    if (std::isfinite(scale) && !(scale > 0.0)) {
        throw ConfigError("censoring scale must be positive (or infinite for none)");
    }
    if (!(shape > 0.0)) throw ConfigError("censoring shape must be positive");
}

void BfdaScenario::validate() const {
    validate_ensemble(generating);
    censoring.validate();
    if (n_participants < 2) throw ConfigError("scenario requires at least two participants");
    if (replications < 0) throw ConfigError("replications must be nonnegative");
    if (design == DesignKind::Sequential) schedule.validate();
}

SurvivalData simulate_trial(const BfdaScenario& scenario, int replication_index) {
    scenario.validate();
    Rng rng(derive_seed(scenario.master_seed, static_cast<std::uint64_t>(replication_index)));
    const GeneratingDraw draw = draw_generating_model(scenario, rng);
    const ModelSpec& model = scenario.generating[draw.model_index];

    const int n = scenario.n_participants;
    const int n_treated = n / 2;
    const bool censor_process = std::isfinite(scenario.censoring.scale);
    const double censor_eta = censor_process ? std::log(scenario.censoring.scale) : 0.0;

    SurvivalData data;
    for (int i = 0; i < n; ++i) {
        const int arm = (i < n - n_treated) ? 0 : 1;
        const double eta = draw.params.alpha + draw.params.beta * arm;
        const double survival = sample_time(model.family, eta, draw.params.gamma, rng);
        double censor = scenario.censoring.cutoff_days;
        if (censor_process) {
            const double c =
                sample_time(Family::Weibull, censor_eta, scenario.censoring.shape, rng);
            censor = std::min(censor, c);
        }
        const bool event = survival <= censor;
        data.add(event ? survival : censor, event, arm);
    }
    return data;
}

Family generating_family(const BfdaScenario& scenario, int replication_index) {
    scenario.validate();
    Rng rng(derive_seed(scenario.master_seed, static_cast<std::uint64_t>(replication_index)));
    const GeneratingDraw draw = draw_generating_model(scenario, rng);
    return scenario.generating[draw.model_index].family;
}

std::vector<double> BfdaResult::bf_samples(Hypothesis h) const {
    const auto& reps = (h == Hypothesis::H0) ? h0 : h1;
    std::vector<double> out;
    out.reserve(reps.size());
    for (const auto& r : reps) out.push_back(r.bf10);
    return out;
}

namespace {

EnsembleConfig analysis_without_family(const EnsembleConfig& config, Family family) {
    EnsembleConfig out;
    out.sampler = config.sampler;
    double total = 0.0;
    for (const auto& m : config.models) {
        if (m.family != family) {
            out.models.push_back(m);
            total += m.weight;
        }
    }
    if (out.models.empty()) {
        throw ConfigError("leave-one-family-out removed every analysis model");
    }
    for (auto& m : out.models) m.weight /= total;
    return out;
}

void run_scenario(const BfdaScenario& scenario, const BfdaAnalysisConfig& config,
                  std::vector<BfdaReplication>& out, int& failures) {
    const int reps = scenario.replications;
    std::vector<std::optional<BfdaReplication>> slots(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), config.n_threads, [&](std::size_t r) {
        const int index = static_cast<int>(r);
        BfdaReplication rec;
        rec.index = index;
        rec.seed = derive_seed(scenario.master_seed, static_cast<std::uint64_t>(index));
        rec.generating = generating_family(scenario, index);

        const SurvivalData data = simulate_trial(scenario, index);
        EnsembleConfig analysis = config.leave_one_family_out
                                      ? analysis_without_family(config.analysis, rec.generating)
                                      : config.analysis;
        const std::uint64_t analysis_seed = derive_seed(rec.seed, kAnalysisTag);

        try {
            if (scenario.design == DesignKind::FixedN) {
                const EnsembleResult res = fit_ensemble(analysis, data, analysis_seed, 1);
                rec.bf10 = res.bf10();

                // Model-averaged effect from the free-beta models, their
                // posterior probabilities renormalized.
                std::vector<PosteriorFit> effect_fits;
                std::vector<double> effect_probs;
                for (std::size_t m = 0; m < res.models.size(); ++m) {
                    if (res.models[m].has_free_beta()) {
                        effect_fits.push_back(res.fits[m]);
                        effect_probs.push_back(res.posterior_probs[m]);
                    }
                }
                const double total =
                    std::accumulate(effect_probs.begin(), effect_probs.end(), 0.0);
                if (total > 0.0) {
                    for (double& p : effect_probs) p /= total;
                    const WeightedDraws mixture = mixture_posterior_beta(effect_fits, effect_probs);
                    rec.beta_mean = mixture.mean();
                    rec.beta_lower = mixture.quantile(0.025);
                    rec.beta_upper = mixture.quantile(0.975);
                }
            } else {
                // No stopping: thresholds beyond any grid, full trajectory kept.
                const DecisionThresholds none{1e300, 1e300};
                rec.trajectory = run_sequential(data, analysis, scenario.schedule, none,
                                                analysis_seed, 1, config.truncation);
                rec.bf10 = rec.trajectory.last_bf10;
            }
            slots[r] = std::move(rec);
        } catch (const NumericError&) {
            slots[r] = std::nullopt;
        }
    });

    failures = 0;
    for (auto& s : slots) {
        if (s.has_value()) {
            out.push_back(std::move(*s));
        } else {
            ++failures;
        }
    }
}

}  // namespace

BfdaResult run_bfda(const BfdaScenario& scenario_h0, const BfdaScenario& scenario_h1,
                    const BfdaAnalysisConfig& config) {
    if (scenario_h0.design != scenario_h1.design ||
        scenario_h0.n_participants != scenario_h1.n_participants) {
        throw ConfigError("BFDA scenarios must share the design and sample size");
    }
    validate_ensemble(config.analysis.models);

    BfdaResult result;
    result.design = scenario_h0.design;
    run_scenario(scenario_h0, config, result.h0, result.failures_h0);
    run_scenario(scenario_h1, config, result.h1, result.failures_h1);
    return result;
}

double nearest_rank_quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level must lie in [0, 1]");
    std::sort(samples.begin(), samples.end());
    const double rank = std::ceil(q * static_cast<double>(samples.size()));
    const std::size_t k = static_cast<std::size_t>(std::max(1.0, rank));
    return samples[std::min(k, samples.size()) - 1];
}

CalibrationResult calibrate_fixed(const std::vector<double>& bf_h0,
                                  const std::vector<double>& bf_h1, double alpha, double beta) {
    if (bf_h0.empty() || bf_h1.empty()) throw ConfigError("calibration requires nonempty samples");

    CalibrationResult cal;
    cal.bf10_threshold = nearest_rank_quantile(bf_h0, 1.0 - alpha);
    const double lower_quantile = nearest_rank_quantile(bf_h1, beta);
    cal.bf01_threshold = 1.0 / lower_quantile;

    const double n0 = static_cast<double>(bf_h0.size());
    const double n1 = static_cast<double>(bf_h1.size());
    double fp = 0.0, fn = 0.0;
    for (double bf : bf_h0) fp += (bf >= cal.bf10_threshold) ? 1.0 : 0.0;
    for (double bf : bf_h1) fn += (bf <= lower_quantile) ? 1.0 : 0.0;
    cal.achieved_false_positive = fp / n0;
    cal.achieved_false_negative = fn / n1;
    cal.achieved_false_positive_se =
        std::sqrt(cal.achieved_false_positive * (1.0 - cal.achieved_false_positive) / n0);
    cal.achieved_false_negative_se =
        std::sqrt(cal.achieved_false_negative * (1.0 - cal.achieved_false_negative) / n1);
    return cal;
}

TrajectoryDecision decide_trajectory(const EvidenceTrajectory& traj,
                                     const DecisionThresholds& thresholds) {
    TrajectoryDecision out;
    for (std::size_t k = 0; k < traj.bf10.size(); ++k) {
        const double bf = traj.bf10[k];
        if (std::isnan(bf)) continue;
        if (bf >= thresholds.bf10_upper) {
            out.decision = Decision::AcceptH1;
            out.time = traj.look_times[k];
            return out;
        }
        if (1.0 / bf >= thresholds.bf01_upper) {
            out.decision = Decision::AcceptH0;
            out.time = traj.look_times[k];
            return out;
        }
    }
    // A truncated trajectory is pinned at its final value past the last look,
    // so thresholds inside the truncation range are treated as crossed there.
    if (traj.truncated && !traj.look_times.empty()) {
        const double bf = traj.last_bf10;
        if (bf >= thresholds.bf10_upper) {
            out.decision = Decision::AcceptH1;
            out.time = traj.look_times.back();
        } else if (1.0 / bf >= thresholds.bf01_upper) {
            out.decision = Decision::AcceptH0;
            out.time = traj.look_times.back();
        }
    }
    return out;
}

namespace {

double crossing_rate(const std::vector<EvidenceTrajectory>& trajectories,
                     const DecisionThresholds& thresholds, Decision which) {
    if (trajectories.empty()) return 0.0;
    double count = 0.0;
    for (const auto& t : trajectories) {
        if (decide_trajectory(t, thresholds).decision == which) count += 1.0;
    }
    return count / static_cast<double>(trajectories.size());
}

}  // namespace

CalibrationResult calibrate_sequential(const std::vector<EvidenceTrajectory>& trajectories_h0,
                                       const std::vector<EvidenceTrajectory>& trajectories_h1,
                                       double alpha, double beta, double grid_cap) {
    if (trajectories_h0.empty() || trajectories_h1.empty()) {
        throw ConfigError("sequential calibration requires nonempty trajectory sets");
    }
    std::vector<double> grid;
    for (double g = 1.1; g <= grid_cap; g *= 1.1) grid.push_back(g);
    if (grid.empty()) throw ConfigError("sequential calibration grid is empty");

    auto smallest_upper = [&](double lower) -> std::optional<double> {
        for (double g : grid) {
            if (crossing_rate(trajectories_h0, {g, lower}, Decision::AcceptH1) <= alpha) return g;
        }
        return std::nullopt;
    };
    auto smallest_lower = [&](double upper) -> std::optional<double> {
        for (double g : grid) {
            if (crossing_rate(trajectories_h1, {upper, g}, Decision::AcceptH0) <= beta) return g;
        }
        return std::nullopt;
    };

    // Both bounds are nondecreasing across rounds and live on a finite grid,
    // so the iteration reaches an exact fixed point or falls off the grid.
    double lower = grid.front();
    double upper = 0.0;
    bool feasible = false;
    for (int round = 0; round < 200; ++round) {
        const auto up = smallest_upper(lower);
        if (!up.has_value()) break;
        const auto low = smallest_lower(*up);
        if (!low.has_value()) break;
        if (*up == upper && *low == lower) {
            feasible = true;
            break;
        }
        upper = *up;
        lower = *low;
    }
    if (!feasible) {
        const DecisionThresholds best{grid.back(), grid.back()};
        throw NumericError(
            "sequential calibration found no feasible boundary pair on the grid; at (" +
            std::to_string(grid.back()) + ", " + std::to_string(grid.back()) +
            ") the crossing rates are " +
            std::to_string(crossing_rate(trajectories_h0, best, Decision::AcceptH1)) + " / " +
            std::to_string(crossing_rate(trajectories_h1, best, Decision::AcceptH0)));
    }

    CalibrationResult cal;
    cal.bf10_threshold = upper;
    cal.bf01_threshold = lower;
    const DecisionThresholds final_pair{upper, lower};
    cal.achieved_false_positive = crossing_rate(trajectories_h0, final_pair, Decision::AcceptH1);
    cal.achieved_false_negative = crossing_rate(trajectories_h1, final_pair, Decision::AcceptH0);
    const double n0 = static_cast<double>(trajectories_h0.size());
    const double n1 = static_cast<double>(trajectories_h1.size());
    cal.achieved_false_positive_se =
        std::sqrt(cal.achieved_false_positive * (1.0 - cal.achieved_false_positive) / n0);
    cal.achieved_false_negative_se =
        std::sqrt(cal.achieved_false_negative * (1.0 - cal.achieved_false_negative) / n1);
    return cal;
}

DesignMetrics evaluate_design(const std::vector<TrajectoryDecision>& decisions, Hypothesis truth) {
    if (decisions.empty()) throw std::invalid_argument("evaluate_design: empty decision list");
    const Decision correct = (truth == Hypothesis::H1) ? Decision::AcceptH1 : Decision::AcceptH0;
    const Decision wrong = (truth == Hypothesis::H1) ? Decision::AcceptH0 : Decision::AcceptH1;

    const double n = static_cast<double>(decisions.size());
    double n_correct = 0.0, n_wrong = 0.0, n_undecided = 0.0;
    std::vector<double> times;
    for (const auto& d : decisions) {
        if (d.decision == correct) n_correct += 1.0;
        else if (d.decision == wrong) n_wrong += 1.0;
        else n_undecided += 1.0;
        if (d.decision != Decision::Undecided) times.push_back(d.time);
    }

    DesignMetrics m;
    m.error_rate = n_wrong / n;
    m.power = n_correct / n;
    m.undecided_fraction = n_undecided / n;
    m.error_rate_se = std::sqrt(m.error_rate * (1.0 - m.error_rate) / n);
    m.power_se = std::sqrt(m.power * (1.0 - m.power) / n);
    m.undecided_fraction_se = std::sqrt(m.undecided_fraction * (1.0 - m.undecided_fraction) / n);

    if (!times.empty()) {
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        m.mean_decision_time = mean;
        if (times.size() > 1) {
            double ss = 0.0;
            for (double t : times) ss += (t - mean) * (t - mean);
            const double sd = std::sqrt(ss / static_cast<double>(times.size() - 1));
            m.mean_decision_time_se = sd / std::sqrt(static_cast<double>(times.size()));
        }
    }
    return m;
}

EstimatorMetrics estimator_metrics(const std::vector<double>& estimates,
                                   const std::vector<double>& truths,
                                   const std::vector<double>& ci_lower,
                                   const std::vector<double>& ci_upper) {
    const std::size_t n = estimates.size();
    if (n == 0 || truths.size() != n || ci_lower.size() != n || ci_upper.size() != n) {
        throw std::invalid_argument("estimator_metrics: mismatched or empty inputs");
    }
    EstimatorMetrics m;
    std::vector<double> errors(n);
    for (std::size_t i = 0; i < n; ++i) errors[i] = estimates[i] - truths[i];

    double mean_err = 0.0;
    for (double e : errors) mean_err += e;
    mean_err /= static_cast<double>(n);
    m.bias = mean_err;
    if (n > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - mean_err) * (e - mean_err);
        m.bias_se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    }

    double mse = 0.0;
    for (double e : errors) mse += e * e;
    mse /= static_cast<double>(n);
    m.rmse = std::sqrt(mse);

    // Jackknife SE of the RMSE by explicit leave-one-out recomputation.
    if (n > 1) {
        std::vector<double> loo(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) acc += errors[j] * errors[j];
            }
            loo[i] = std::sqrt(acc / static_cast<double>(n - 1));
        }
        double loo_mean = 0.0;
        for (double v : loo) loo_mean += v;
        loo_mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
        m.rmse_se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    }

    double covered = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (ci_lower[i] <= truths[i] && truths[i] <= ci_upper[i]) covered += 1.0;
    }
    m.coverage = covered / static_cast<double>(n);
    m.coverage_se = std::sqrt(m.coverage * (1.0 - m.coverage) / static_cast<double>(n));
    return m;
}

}  // namespace survbma
