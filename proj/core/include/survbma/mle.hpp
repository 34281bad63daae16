#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survbma/families.hpp"

namespace survbma {

struct MleFit {
    Family family = Family::Exponential;
    ParamVector estimates;
    /// Standard errors aligned with the free parameters (beta when the
    /// treatment is included, alpha, gamma on the natural scale). NaN when the
    /// Hessian was singular.
    double se_beta = 0.0;
    double se_alpha = 0.0;
    double se_gamma = 0.0;
    double se_log_gamma = 0.0;  // log-scale SE, used by the meta-analytic pipeline
    double log_lik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    bool hessian_pd = false;
    bool includes_treatment = false;
    int num_free_params = 0;

    /// One-sided Wald z statistic for the treatment effect.
    double wald_z() const;
};

/// Maximum-likelihood fit of one family: Nelder-Mead in unconstrained space
/// followed by a coordinate Newton polish; SEs from the central-difference
/// Hessian of the negative log-likelihood, delta-method mapped for gamma.
MleFit fit_mle(Family family, const SurvivalData& data, bool include_treatment);

/// Index of the fit minimizing AIC or BIC; ties break toward the lower
/// family enumeration order.
enum class SelectionCriterion { AIC, BIC };
std::size_t select_model(const std::vector<MleFit>& fits, SelectionCriterion criterion);

}  // namespace survbma
