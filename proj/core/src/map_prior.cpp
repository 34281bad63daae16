#include "survbma/map_prior.hpp"

#include <cmath>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"

namespace survbma {

FamilyStudyEstimates study_estimates(Family family,
                                     const std::vector<SurvivalData>& historical) {
    FamilyStudyEstimates out;
    out.family = family;
    for (std::size_t k = 0; k < historical.size(); ++k) {
        try {
            const MleFit fit = fit_mle(family, historical[k], /*include_treatment=*/false);
            if (!fit.hessian_pd || !std::isfinite(fit.se_alpha)) {
                throw NumericError("standard errors unavailable");
            }
            out.alpha.push_back({fit.estimates.alpha, fit.se_alpha});
            if (family_has_shape(family)) {
                out.log_gamma.push_back({std::log(*fit.estimates.gamma), fit.se_log_gamma});
            }
        } catch (const std::exception& e) {
            out.warnings.push_back("study " + std::to_string(k + 1) + " excluded: " + e.what());
        }
    }
    return out;
}

MetaAnalyticPrior meta_analyze(const std::vector<StudyEstimate>& estimates,
                               const SamplerSettings& settings, PredictiveScale scale,
                               const MetaAnalysisOptions& options) {
    if (estimates.empty()) throw ConfigError("meta-analysis requires at least one study");
    for (const auto& e : estimates) {
        if (!(e.standard_error > 0.0) || !std::isfinite(e.standard_error)) {
            throw ConfigError("study standard errors must be positive and finite");
        }
        if (!std::isfinite(e.estimate)) throw ConfigError("study estimates must be finite");
    }

    McmcTarget target;
    target.params.push_back({"mu", options.mu_prior, Transform::for_prior(options.mu_prior)});
    if (!options.fix_tau_to_zero) {
        target.params.push_back({"tau", options.tau_prior, Transform::for_prior(options.tau_prior)});
    }
    const bool fixed_tau = options.fix_tau_to_zero;
    target.log_likelihood = [estimates, fixed_tau](std::span<const double> x) {
        const double mu = x[0];
        const double tau = fixed_tau ? 0.0 : x[1];
        double ll = 0.0;
        for (const auto& e : estimates) {
            const double var = e.standard_error * e.standard_error + tau * tau;
            const double z = (e.estimate - mu);
            ll += -0.5 * z * z / var - 0.5 * std::log(var);
        }
        return ll;
    };

    const PosteriorFit fit = run_mwg(target, settings);

    MetaAnalyticPrior prior;
    prior.pooled_mean = fit.mean(0);
    prior.pooled_se = fit.sd(0);
    prior.tau = fixed_tau ? 0.0 : fit.mean(1);

    const double predictive_sd =
        std::sqrt(prior.pooled_se * prior.pooled_se + prior.tau * prior.tau);
    prior.predictive = (scale == PredictiveScale::Intercept)
                           ? PriorSpec::normal(prior.pooled_mean, predictive_sd)
                           : PriorSpec::log_normal(prior.pooled_mean, predictive_sd);
    return prior;
}

}  // namespace survbma
