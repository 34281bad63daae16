#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "survbma/bridge.hpp"
#include "survbma/priors.hpp"
#include "survbma/sampler.hpp"

namespace survbma {

/// Posterior model probabilities from prior probabilities and log marginal
/// likelihoods, normalized by log-sum-exp.
std::vector<double> posterior_model_probs(std::span<const double> prior_probs,
                                          std::span<const double> log_mls);

/// exp(log_ml_1 - log_ml_0); equals posterior odds over prior odds.
double bayes_factor(double log_ml_1, double log_ml_0);

/// Inclusion Bayes factor for a model subset; `degenerate` is set when the
/// subset or complement carries exactly zero posterior mass (value is then
/// +inf or 0).
struct InclusionBf {
    double value = 1.0;
    bool degenerate = false;
};

InclusionBf inclusion_bf(std::span<const double> prior_probs,
                         std::span<const double> posterior_probs,
                         std::span<const std::size_t> subset);

/// Posterior draws pooled across models with per-draw weights.
class WeightedDraws {
  public:
    /// `exact_mean`, when given, overrides the accumulated weighted mean with
    /// a value computed by the caller in exact form (e.g. sum of per-model
    /// means times probabilities).
    WeightedDraws(std::vector<double> values, std::vector<double> weights,
                  std::optional<double> exact_mean = {});

    double mean() const;

    /// Weighted empirical-CDF quantile: smallest value with cumulative
    /// normalized weight >= q.
    double quantile(double q) const;

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<double> values_;   // sorted ascending
    std::vector<double> weights_;  // aligned, normalized
    std::vector<double> cumulative_;
    double mean_ = 0.0;
};

/// Mixture posterior of the treatment effect over models that estimate it.
/// Every fit must have beta as a free parameter. The mixture mean equals the
/// probability-weighted per-model means exactly.
WeightedDraws mixture_posterior_beta(std::span<const PosteriorFit> fits,
                                     std::span<const double> posterior_probs);

struct AveragedCurve {
    std::vector<double> grid;   // days
    std::vector<double> mean;   // model-averaged pointwise value
    std::vector<double> lower;  // central 95% band
    std::vector<double> upper;
};

/// Model-averaged survival function for one arm on a positive time grid.
/// Pointwise: sum over models of the posterior-mean survival, weighted by
/// posterior model probabilities; bands from weighted pooled draw values.
AveragedCurve model_averaged_survival(std::span<const double> grid,
                                      std::span<const ModelSpec> models,
                                      std::span<const PosteriorFit> fits,
                                      std::span<const double> posterior_probs, int treatment);

/// Same averaging for the hazard function.
AveragedCurve model_averaged_hazard(std::span<const double> grid,
                                    std::span<const ModelSpec> models,
                                    std::span<const PosteriorFit> fits,
                                    std::span<const double> posterior_probs, int treatment);

struct EnsembleConfig {
    std::vector<ModelSpec> models;
    SamplerSettings sampler;
};

struct EnsembleResult {
    std::vector<ModelSpec> models;
    std::vector<PosteriorFit> fits;
    std::vector<BridgeResult> bridges;
    std::vector<double> prior_probs;
    std::vector<double> posterior_probs;
    std::vector<double> log_mls;
    InclusionBf effect_bf;                      // free-beta vs spike-beta models
    bool has_effect_split = false;              // true when both subsets are nonempty
    std::map<Family, InclusionBf> family_bf;    // per represented family
    std::vector<InclusionBf> per_model_bf;      // singleton subsets
    std::vector<std::string> warnings;

    /// BF10 for the treatment effect; requires has_effect_split.
    double bf10() const;
};

/// Fits every model (posterior sampling + bridge-sampled marginal likelihood)
/// and aggregates the ensemble quantities. Model m uses seed derive_seed(seed, m);
/// results are identical for any thread count.
EnsembleResult fit_ensemble(const EnsembleConfig& config, const SurvivalData& data,
                            std::uint64_t seed, int n_threads = 1);

}  // namespace survbma
