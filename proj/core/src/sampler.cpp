#include "survbma/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

void SamplerSettings::validate() const {
    if (chains < 2) throw ConfigError("sampler requires at least 2 chains for diagnostics");
    if (burnin <= 0 || samples <= 0) throw ConfigError("sampler iterations must be positive");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
        throw ConfigError("target acceptance must lie in (0, 1)");
    }
}

Transform Transform::for_prior(const PriorSpec& prior) {
    Transform t;
    const double lo = prior.support_lower();
    const double hi = prior.support_upper();
    if (lo == -kInf && hi == kInf) {
        t.kind_ = Kind::Identity;
    } else if (hi == kInf) {
        t.kind_ = Kind::LowerBounded;
        t.lower_ = lo;
    } else if (lo == -kInf) {
        t.kind_ = Kind::UpperBounded;
        t.upper_ = hi;
    } else {
        t.kind_ = Kind::Interval;
        t.lower_ = lo;
        t.upper_ = hi;
    }
    return t;
}

double Transform::to_unconstrained(double x) const {
    switch (kind_) {
        case Kind::Identity: return x;
        case Kind::LowerBounded: return std::log(x - lower_);
        case Kind::UpperBounded: return std::log(upper_ - x);
        case Kind::Interval: {
            const double p = (x - lower_) / (upper_ - lower_);
            return std::log(p) - std::log1p(-p);
        }
    }
    return x;  // unreachable
}

double Transform::to_constrained(double z) const {
    switch (kind_) {
        case Kind::Identity: return z;
        case Kind::LowerBounded: return lower_ + std::exp(z);
        case Kind::UpperBounded: return upper_ - std::exp(z);
        case Kind::Interval: return lower_ + (upper_ - lower_) * sigmoid(z);
    }
    return z;  // unreachable
}

double Transform::log_jacobian(double z) const {
    switch (kind_) {
        case Kind::Identity: return 0.0;
        case Kind::LowerBounded:
        case Kind::UpperBounded: return z;
        case Kind::Interval: {
            const double s = sigmoid(z);
            return std::log(upper_ - lower_) + std::log(s) + std::log1p(-s);
        }
    }
    return 0.0;  // unreachable
}

void McmcTarget::constrain(std::span<const double> z, std::span<double> x) const {
    for (std::size_t j = 0; j < params.size(); ++j) {
        x[j] = params[j].transform.to_constrained(z[j]);
    }
}

double McmcTarget::log_density_unconstrained(std::span<const double> z,
                                             std::span<double> scratch) const {
    constrain(z, scratch);
    double lp = 0.0;
    for (std::size_t j = 0; j < params.size(); ++j) {
        lp += params[j].prior.log_density(scratch[j]);
        lp += params[j].transform.log_jacobian(z[j]);
        if (lp == -kInf || std::isnan(lp)) return -kInf;
    }
    const double ll = log_likelihood(scratch);
    if (std::isnan(ll)) return -kInf;
    return lp + ll;
}

double PosteriorFit::mean(std::size_t j) const {
    double acc = 0.0;
    for (std::size_t r = 0; r < draws.rows(); ++r) acc += draws(r, j);
    return acc / static_cast<double>(draws.rows());
}

double PosteriorFit::sd(std::size_t j) const {
    const double m = mean(j);
    double acc = 0.0;
    for (std::size_t r = 0; r < draws.rows(); ++r) {
        const double d = draws(r, j) - m;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(draws.rows() - 1));
}

namespace {

// Draw an initial point from the priors, clamped to center +- 5 spreads to
// avoid immediate overflow in exp(eta).
void draw_initial_point(const McmcTarget& target, Rng& rng, std::span<double> z) {
    for (std::size_t j = 0; j < target.params.size(); ++j) {
        const auto& p = target.params[j];
        double x = p.prior.sample(rng);
        const double center = p.prior.clamp_center();
        const double spread = p.prior.clamp_spread();
        if (spread > 0.0) {
            x = std::min(std::max(x, center - 5.0 * spread), center + 5.0 * spread);
        }
        const double lo = p.prior.support_lower();
        const double hi = p.prior.support_upper();
        if (x <= lo) x = std::nextafter(lo, hi);
        if (x >= hi) x = std::nextafter(hi, lo);
        z[j] = p.transform.to_unconstrained(x);
    }
}

struct SplitStats {
    double rhat;
    double ess;
};

// Split each chain in half and compute Rhat / ESS over the 2*chains halves.
SplitStats split_diagnostics(std::span<const double> draws, int chains) {
    const std::size_t per_chain = draws.size() / static_cast<std::size_t>(chains);
    const std::size_t half = per_chain / 2;
    if (half < 2) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    const int m = 2 * chains;

    std::vector<std::span<const double>> seq;
    for (int c = 0; c < chains; ++c) {
        const double* base = draws.data() + static_cast<std::size_t>(c) * per_chain;
        seq.push_back({base, half});
        seq.push_back({base + (per_chain - half), half});
    }

    std::vector<double> means(m), vars(m);
    for (int s = 0; s < m; ++s) {
        double mu = 0.0;
        for (double v : seq[s]) mu += v;
        mu /= static_cast<double>(half);
        double var = 0.0;
        for (double v : seq[s]) var += (v - mu) * (v - mu);
        var /= static_cast<double>(half - 1);
        means[s] = mu;
        vars[s] = var;
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= static_cast<double>(half) / (m - 1);
    const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    const double n = static_cast<double>(half);
    const double var_plus = (n - 1.0) / n * w + b / n;

    double rhat;
    if (w <= 0.0) {
        rhat = (b <= 0.0) ? 1.0 : kInf;
    } else {
        rhat = std::sqrt(var_plus / w);
    }

    // ESS via chain-averaged autocorrelations with Geyer's initial monotone
    // positive sequence.
    double ess = 0.0;
    if (var_plus > 0.0) {
        const std::size_t max_lag = half - 1;
        std::vector<double> rho(max_lag, 0.0);
        double sum_rho = 0.0;
        double prev_pair = kInf;
        std::size_t t = 1;
        while (t + 1 < max_lag) {
            double pair = 0.0;
            for (int lag_off = 0; lag_off < 2; ++lag_off) {
                const std::size_t lag = t + static_cast<std::size_t>(lag_off);
                double acov = 0.0;
                for (int s = 0; s < m; ++s) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i + lag < half; ++i) {
                        acc += (seq[s][i] - means[s]) * (seq[s][i + lag] - means[s]);
                    }
                    acov += acc / static_cast<double>(half);
                }
                acov /= m;
                rho[lag] = 1.0 - (w - acov) / var_plus;
                pair += rho[lag];
            }
            if (pair < 0.0) break;
            pair = std::min(pair, prev_pair);  // enforce monotonicity
            prev_pair = pair;
            sum_rho += pair;
            t += 2;
        }
        ess = static_cast<double>(m) * n / (1.0 + 2.0 * sum_rho);
        ess = std::min(ess, static_cast<double>(m) * n);
    }
    return {rhat, ess};
}

}  // namespace

PosteriorFit run_mwg(const McmcTarget& target, const SamplerSettings& settings) {
    settings.validate();
    const std::size_t d = target.dim();

    PosteriorFit fit;
    fit.chains = settings.chains;
    fit.samples_per_chain = settings.samples;
    for (const auto& p : target.params) fit.names.push_back(p.name);

    if (d == 0) {
        std::vector<double> none;
        fit.const_log_posterior = target.log_likelihood(none);
        return fit;
    }

    const std::size_t total = static_cast<std::size_t>(settings.chains) *
                              static_cast<std::size_t>(settings.samples);
    fit.draws = Matrix(total, d);
    fit.draws_unconstrained = Matrix(total, d);
    fit.log_posterior.assign(total, 0.0);

    std::vector<double> scratch(d);

    for (int chain = 0; chain < settings.chains; ++chain) {
        Rng rng(derive_seed(settings.seed, static_cast<std::uint64_t>(chain)));

        std::vector<double> z(d);
        double lp = -kInf;
        bool initialized = false;
        for (int attempt = 0; attempt < 100 && !initialized; ++attempt) {
            draw_initial_point(target, rng, z);
            lp = target.log_density_unconstrained(z, scratch);
            initialized = std::isfinite(lp);
        }
        if (!initialized) {
            throw NumericError("sampler initialization failed: target non-finite after 100 draws");
        }

        std::vector<double> log_step(d, 0.0);
        const int total_iters = settings.burnin + settings.samples;
        for (int iter = 0; iter < total_iters; ++iter) {
            const bool adapting = iter < settings.burnin;
            for (std::size_t j = 0; j < d; ++j) {
                const double old_zj = z[j];
                z[j] = old_zj + std::exp(log_step[j]) * rng.normal();
                const double lp_prop = target.log_density_unconstrained(z, scratch);
                const double log_alpha = std::min(0.0, lp_prop - lp);
                const double alpha = std::isnan(log_alpha) ? 0.0 : std::exp(log_alpha);
                if (rng.uniform01() < alpha) {
                    lp = lp_prop;
                } else {
                    z[j] = old_zj;
                }
                if (adapting) {
                    // Robbins-Monro on the log step toward the target rate.
                    const double gain = std::pow(static_cast<double>(iter + 1), -0.6);
                    log_step[j] += gain * (alpha - settings.target_acceptance);
                    log_step[j] = std::min(std::max(log_step[j], -12.0), 12.0);
                }
            }
            if (!adapting) {
                const std::size_t row = static_cast<std::size_t>(chain) *
                                            static_cast<std::size_t>(settings.samples) +
                                        static_cast<std::size_t>(iter - settings.burnin);
                target.constrain(z, scratch);
                for (std::size_t j = 0; j < d; ++j) {
                    fit.draws(row, j) = scratch[j];
                    fit.draws_unconstrained(row, j) = z[j];
                }
                fit.log_posterior[row] = lp;
            }
        }
    }

    fit.rhat.resize(d);
    fit.ess.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto column = fit.draws.column(j);
        const auto stats = split_diagnostics(column, settings.chains);
        fit.rhat[j] = stats.rhat;
        fit.ess[j] = stats.ess;
        if (std::isfinite(stats.rhat) && stats.rhat > 1.05) {
            fit.warnings.push_back("Rhat above 1.05 for parameter " + fit.names[j]);
        }
    }
    return fit;
}

ParamVector assemble_params(const ModelSpec& model, std::span<const double> free_values) {
    ParamVector p;
    std::size_t idx = 0;
    p.beta = model.beta.is_spike() ? model.beta.spike_value() : free_values[idx++];
    p.alpha = model.alpha.is_spike() ? model.alpha.spike_value() : free_values[idx++];
    if (model.gamma.has_value()) {
        p.gamma = model.gamma->is_spike() ? model.gamma->spike_value() : free_values[idx++];
    }
    return p;
}

McmcTarget build_posterior_target(const ModelSpec& model, const LikelihoodContext& likelihood) {
    model.validate();
    McmcTarget target;
    if (!model.beta.is_spike()) {
        target.params.push_back({"beta", model.beta, Transform::for_prior(model.beta)});
    }
    if (!model.alpha.is_spike()) {
        target.params.push_back({"alpha", model.alpha, Transform::for_prior(model.alpha)});
    }
    if (model.gamma.has_value() && !model.gamma->is_spike()) {
        target.params.push_back({"gamma", *model.gamma, Transform::for_prior(*model.gamma)});
    }
    target.log_likelihood = [model, likelihood](std::span<const double> free_values) {
        return likelihood(assemble_params(model, free_values));
    };
    return target;
}

PosteriorFit sample_posterior(const ModelSpec& model, const SurvivalData& data,
                              const SamplerSettings& settings) {
    const LikelihoodContext likelihood(data, model.family);
    return run_mwg(build_posterior_target(model, likelihood), settings);
}

double split_rhat(std::span<const double> draws, int chains) {
    return split_diagnostics(draws, chains).rhat;
}

double split_ess(std::span<const double> draws, int chains) {
    return split_diagnostics(draws, chains).ess;
}

}  // namespace survbma
