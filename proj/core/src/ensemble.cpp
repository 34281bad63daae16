#include "survbma/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"
#include "survbma/threading.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBridgeSeedTag = 0xB51D;

}  // namespace

std::vector<double> posterior_model_probs(std::span<const double> prior_probs,
                                          std::span<const double> log_mls) {
    if (prior_probs.size() != log_mls.size() || prior_probs.empty()) {
        throw std::invalid_argument("posterior_model_probs: mismatched vector lengths");
    }
    std::vector<double> log_weights(prior_probs.size());
    for (std::size_t j = 0; j < prior_probs.size(); ++j) {
        log_weights[j] = std::log(prior_probs[j]) + log_mls[j];
    }
    const double norm = special::log_sum_exp(log_weights);
    if (norm == -kInf) {
        throw NumericError("all marginal likelihoods are zero; posterior undefined");
    }
    std::vector<double> probs(prior_probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) probs[j] = std::exp(log_weights[j] - norm);
    return probs;
}

double bayes_factor(double log_ml_1, double log_ml_0) {
    if (std::isnan(log_ml_1) || std::isnan(log_ml_0)) {
        throw std::invalid_argument("bayes_factor: inputs must not be NaN");
    }
    return std::exp(log_ml_1 - log_ml_0);
}

InclusionBf inclusion_bf(std::span<const double> prior_probs,
                         std::span<const double> posterior_probs,
                         std::span<const std::size_t> subset) {
    if (prior_probs.size() != posterior_probs.size()) {
        throw std::invalid_argument("inclusion_bf: mismatched vector lengths");
    }
    if (subset.empty() || subset.size() >= prior_probs.size()) {
        throw std::invalid_argument("inclusion_bf: subset must be nonempty and proper");
    }
    std::vector<bool> in_subset(prior_probs.size(), false);
    for (std::size_t idx : subset) {
        if (idx >= prior_probs.size()) throw std::invalid_argument("inclusion_bf: index out of range");
        in_subset[idx] = true;
    }
    double prior_in = 0.0, prior_out = 0.0, post_in = 0.0, post_out = 0.0;
    for (std::size_t j = 0; j < prior_probs.size(); ++j) {
        (in_subset[j] ? prior_in : prior_out) += prior_probs[j];
        (in_subset[j] ? post_in : post_out) += posterior_probs[j];
    }
    InclusionBf out;
    if (post_in == 0.0 || post_out == 0.0) {
        out.degenerate = true;
        out.value = (post_in == 0.0) ? 0.0 : kInf;
        return out;
    }
    out.value = (post_in / post_out) / (prior_in / prior_out);
    return out;
}

WeightedDraws::WeightedDraws(std::vector<double> values, std::vector<double> weights,
                             std::optional<double> exact_mean) {
    if (values.size() != weights.size() || values.empty()) {
        throw std::invalid_argument("WeightedDraws: mismatched or empty inputs");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("WeightedDraws: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("WeightedDraws: weights sum to zero");

    values_.reserve(values.size());
    weights_.reserve(values.size());
    for (std::size_t idx : order) {
        values_.push_back(values[idx]);
        weights_.push_back(weights[idx] / total);
    }
    cumulative_.resize(values_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        acc += weights_[i];
        cumulative_[i] = acc;
    }
    if (exact_mean.has_value()) {
        mean_ = *exact_mean;
    } else {
        mean_ = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) mean_ += weights_[i] * values_[i];
    }
}

double WeightedDraws::mean() const { return mean_; }

double WeightedDraws::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level must lie in [0, 1]");
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), q);
    const std::size_t idx =
        (it == cumulative_.end()) ? values_.size() - 1
                                  : static_cast<std::size_t>(it - cumulative_.begin());
    return values_[idx];
}

WeightedDraws mixture_posterior_beta(std::span<const PosteriorFit> fits,
                                     std::span<const double> posterior_probs) {
    if (fits.size() != posterior_probs.size() || fits.empty()) {
        throw std::invalid_argument("mixture_posterior_beta: mismatched inputs");
    }
    std::vector<double> values;
    std::vector<double> weights;
    double weighted_mean = 0.0;
    for (std::size_t m = 0; m < fits.size(); ++m) {
        const auto& fit = fits[m];
        const auto it = std::find(fit.names.begin(), fit.names.end(), "beta");
        if (it == fit.names.end()) {
            throw std::logic_error("mixture_posterior_beta: fit lacks a free treatment effect");
        }
        const std::size_t col = static_cast<std::size_t>(it - fit.names.begin());
        const double per_draw = posterior_probs[m] / static_cast<double>(fit.kept());
        for (std::size_t r = 0; r < fit.kept(); ++r) {
            values.push_back(fit.draws(r, col));
            weights.push_back(per_draw);
        }
        weighted_mean += posterior_probs[m] * fit.mean(col);
    }
    return WeightedDraws(std::move(values), std::move(weights), weighted_mean);
}

namespace {

using PointFn = double (*)(Family, double, double, std::optional<double>);

AveragedCurve averaged_curve(std::span<const double> grid, std::span<const ModelSpec> models,
                             std::span<const PosteriorFit> fits,
                             std::span<const double> posterior_probs, int treatment,
                             PointFn log_point) {
    if (models.size() != fits.size() || models.size() != posterior_probs.size()) {
        throw std::invalid_argument("model-averaged curve: mismatched inputs");
    }
    for (double t : grid) {
        if (!(t > 0.0)) throw std::domain_error("curve grid times must be positive");
    }
    AveragedCurve curve;
    curve.grid.assign(grid.begin(), grid.end());
    curve.mean.resize(grid.size());
    curve.lower.resize(grid.size());
    curve.upper.resize(grid.size());

    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        double averaged = 0.0;
        std::vector<double> pooled_values;
        std::vector<double> pooled_weights;
        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto& model = models[m];
            const auto& fit = fits[m];
            double model_mean = 0.0;
            if (fit.free_dim() == 0) {
                const ParamVector p = assemble_params(model, {});
                const double eta = p.alpha + p.beta * treatment;
                const double v = std::exp(log_point(model.family, t, eta, p.gamma));
                model_mean = v;
                pooled_values.push_back(v);
                pooled_weights.push_back(posterior_probs[m]);
            } else {
                const double per_draw = posterior_probs[m] / static_cast<double>(fit.kept());
                for (std::size_t r = 0; r < fit.kept(); ++r) {
                    const ParamVector p = assemble_params(model, fit.draws.row(r));
                    const double eta = p.alpha + p.beta * treatment;
                    const double v = std::exp(log_point(model.family, t, eta, p.gamma));
                    model_mean += v;
                    pooled_values.push_back(v);
                    pooled_weights.push_back(per_draw);
                }
                model_mean /= static_cast<double>(fit.kept());
            }
            averaged += posterior_probs[m] * model_mean;
        }
        curve.mean[g] = averaged;
        WeightedDraws pooled(std::move(pooled_values), std::move(pooled_weights));
        curve.lower[g] = pooled.quantile(0.025);
        curve.upper[g] = pooled.quantile(0.975);
    }
    return curve;
}

}  // namespace

AveragedCurve model_averaged_survival(std::span<const double> grid,
                                      std::span<const ModelSpec> models,
                                      std::span<const PosteriorFit> fits,
                                      std::span<const double> posterior_probs, int treatment) {
    return averaged_curve(grid, models, fits, posterior_probs, treatment, &log_survival);
}

AveragedCurve model_averaged_hazard(std::span<const double> grid,
                                    std::span<const ModelSpec> models,
                                    std::span<const PosteriorFit> fits,
                                    std::span<const double> posterior_probs, int treatment) {
    return averaged_curve(grid, models, fits, posterior_probs, treatment, &log_hazard);
}

double EnsembleResult::bf10() const {
    if (!has_effect_split) {
        throw std::logic_error("ensemble has no effect/null split; BF10 undefined");
    }
    return effect_bf.value;
}

EnsembleResult fit_ensemble(const EnsembleConfig& config, const SurvivalData& data,
                            std::uint64_t seed, int n_threads) {
    validate_ensemble(config.models);
    const std::size_t m = config.models.size();

    EnsembleResult result;
    result.models = config.models;
    result.fits.resize(m);
    result.bridges.resize(m);
    result.prior_probs.resize(m);
    result.log_mls.resize(m);

    parallel_for(m, n_threads, [&](std::size_t j) {
        const auto& model = config.models[j];
        SamplerSettings settings = config.sampler;
        settings.seed = derive_seed(seed, j);
        result.fits[j] = sample_posterior(model, data, settings);
        result.bridges[j] =
            bridge_marglik(result.fits[j], model, data, derive_seed(settings.seed, kBridgeSeedTag));
    });

    for (std::size_t j = 0; j < m; ++j) {
        result.prior_probs[j] = config.models[j].weight;
        result.log_mls[j] = result.bridges[j].log_marglik;
        for (const auto& w : result.fits[j].warnings) {
            result.warnings.push_back(std::string(family_name(config.models[j].family)) + ": " + w);
        }
    }
    result.posterior_probs = posterior_model_probs(result.prior_probs, result.log_mls);

    std::vector<std::size_t> effect_subset;
    for (std::size_t j = 0; j < m; ++j) {
        if (config.models[j].has_free_beta()) effect_subset.push_back(j);
    }
    result.has_effect_split = !effect_subset.empty() && effect_subset.size() < m;
    if (result.has_effect_split) {
        result.effect_bf = inclusion_bf(result.prior_probs, result.posterior_probs, effect_subset);
    }

    for (Family f : kAllFamilies) {
        std::vector<std::size_t> family_subset;
        for (std::size_t j = 0; j < m; ++j) {
            if (config.models[j].family == f) family_subset.push_back(j);
        }
        if (!family_subset.empty() && family_subset.size() < m) {
            result.family_bf[f] =
                inclusion_bf(result.prior_probs, result.posterior_probs, family_subset);
        }
    }

    result.per_model_bf.resize(m);
    if (m > 1) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t singleton[1] = {j};
            result.per_model_bf[j] =
                inclusion_bf(result.prior_probs, result.posterior_probs, singleton);
        }
    }
    return result;
}

}  // namespace survbma
