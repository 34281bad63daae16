#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survbma/mle.hpp"
#include "survbma/priors.hpp"
#include "survbma/sampler.hpp"

namespace survbma {

/// One historical-study summary: a point estimate and its standard error,
/// on the intercept scale for alpha and the log scale for gamma.
struct StudyEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

struct FamilyStudyEstimates {
    Family family = Family::Exponential;
    std::vector<StudyEstimate> alpha;
    std::vector<StudyEstimate> log_gamma;  // empty for the exponential family
    std::vector<std::string> warnings;     // studies excluded by fit failures
};

/// Per-study maximum-likelihood estimates for one family, without a treatment
/// covariate; shape estimates are mapped to the log scale.
FamilyStudyEstimates study_estimates(Family family,
                                     const std::vector<SurvivalData>& historical);

enum class PredictiveScale { Intercept, LogShape };

struct MetaAnalyticPrior {
    double pooled_mean = 0.0;  // posterior mean of mu
    double pooled_se = 0.0;    // posterior sd of mu
    double tau = 0.0;          // posterior mean of the heterogeneity
    PriorSpec predictive;      // Normal for intercepts, LogNormal for shapes
};

struct MetaAnalysisOptions {
    bool fix_tau_to_zero = false;  // diagnostic mode
    PriorSpec mu_prior = PriorSpec::cauchy(0.0, 100.0);
    PriorSpec tau_prior = PriorSpec::half_cauchy(10.0);
};

/// Bayesian random-effects meta-analysis: estimate_k ~ Normal(mu, sqrt(se_k^2
/// + tau^2)). The predictive prior is Normal(pooled_mean, sqrt(pooled_se^2 +
/// tau^2)) on the estimation scale; on the log scale it is returned as the
/// corresponding LogNormal.
MetaAnalyticPrior meta_analyze(const std::vector<StudyEstimate>& estimates,
                               const SamplerSettings& settings, PredictiveScale scale,
                               const MetaAnalysisOptions& options = {});

}  // namespace survbma
