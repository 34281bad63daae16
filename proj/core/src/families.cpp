#include "survbma/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernels work on w = log t - eta, the log time shifted to the unit-scale
// baseline. Inputs are validated once by the public entry points.

double log_survival_kernel(Family family, double w, double gamma) {
    switch (family) {
        case Family::Exponential:
            return -std::exp(w);
        case Family::Weibull:
            return -std::exp(gamma * w);
        case Family::LogNormal:
            return special::normal_logcdf(-w / gamma);
        case Family::LogLogistic:
            return -special::log1p_exp(gamma * w);
        case Family::Gamma:
            return special::log_gamma_q(gamma, std::exp(w));
    }
    return 0.0;  // unreachable
}

double log_density_kernel(Family family, double w, double eta, double gamma) {
    switch (family) {
        case Family::Exponential:
            return -eta - std::exp(w);
        case Family::Weibull:
            return std::log(gamma) + (gamma - 1.0) * w - std::exp(gamma * w) - eta;
        case Family::LogNormal:
            return special::normal_logpdf(w / gamma) - (w + eta) - std::log(gamma);
        case Family::LogLogistic: {
            const double u = gamma * w;
            return std::log(gamma) + u - (w + eta) - 2.0 * special::log1p_exp(u);
        }
        case Family::Gamma:
            return (gamma - 1.0) * w - std::exp(w) - std::lgamma(gamma) - eta;
    }
    return 0.0;  // unreachable
}

double log_hazard_kernel(Family family, double w, double eta, double gamma) {
    const double log_sf = log_survival_kernel(family, w, gamma);
    if (log_sf == -kInf) throw NumericError("log_hazard: survival underflowed to zero");
    return log_density_kernel(family, w, eta, gamma) - log_sf;
}

double validate_point_args(Family family, double t, double eta, std::optional<double> gamma) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::domain_error("survival time must be positive and finite");
    }
    if (!std::isfinite(eta)) throw std::domain_error("linear predictor must be finite");
    if (family_has_shape(family)) {
        if (!gamma.has_value()) {
            throw std::invalid_argument(std::string("family ") + std::string(family_name(family)) +
                                        " requires a shape parameter");
        }
        if (!(*gamma > 0.0) || !std::isfinite(*gamma)) {
            throw std::domain_error("shape parameter must be positive and finite");
        }
        return *gamma;
    }
    if (gamma.has_value()) {
        throw std::invalid_argument("exponential family takes no shape parameter");
    }
    return 1.0;
}

double validate_params(Family family, const ParamVector& params) {
    if (!std::isfinite(params.beta) || !std::isfinite(params.alpha)) {
        throw std::domain_error("regression parameters must be finite");
    }
    if (family_has_shape(family)) {
        if (!params.gamma.has_value()) {
            throw std::invalid_argument(std::string("family ") + std::string(family_name(family)) +
                                        " requires a shape parameter");
        }
        if (!(*params.gamma > 0.0) || !std::isfinite(*params.gamma)) {
            throw std::domain_error("shape parameter must be positive and finite");
        }
        return *params.gamma;
    }
    if (params.gamma.has_value()) {
        throw std::invalid_argument("exponential family takes no shape parameter");
    }
    return 1.0;
}

}  // namespace

bool family_has_shape(Family family) { return family != Family::Exponential; }

std::string_view family_name(Family family) {
    switch (family) {
        case Family::Exponential: return "exponential";
        case Family::Weibull: return "weibull";
        case Family::LogNormal: return "lognormal";
        case Family::LogLogistic: return "loglogistic";
        case Family::Gamma: return "gamma";
    }
    return "?";
}

Family family_from_name(std::string_view name) {
    for (Family f : kAllFamilies) {
        if (family_name(f) == name) return f;
    }
    throw ConfigError("unknown parametric family: " + std::string(name));
}

void SurvivalData::add(double time, bool event, int treatment) {
    if (!(time > 0.0) || !std::isfinite(time)) {
        throw std::domain_error("survival time must be positive and finite");
    }
    if (treatment != 0 && treatment != 1) {
        throw std::domain_error("treatment indicator must be 0 or 1");
    }
    time_.push_back(time);
    event_.push_back(event ? 1 : 0);
    treatment_.push_back(static_cast<std::uint8_t>(treatment));
}

std::size_t SurvivalData::num_events() const {
    return static_cast<std::size_t>(std::count(event_.begin(), event_.end(), std::uint8_t{1}));
}

std::size_t SurvivalData::num_in_arm(int treatment) const {
    return static_cast<std::size_t>(
        std::count(treatment_.begin(), treatment_.end(), static_cast<std::uint8_t>(treatment)));
}

double SurvivalData::max_time() const {
    if (time_.empty()) return 0.0;
    return *std::max_element(time_.begin(), time_.end());
}

void SurvivalData::validate() const {
    for (std::size_t i = 0; i < time_.size(); ++i) {
        if (!(time_[i] > 0.0) || !std::isfinite(time_[i])) {
            throw std::domain_error("record " + std::to_string(i + 1) +
                                    ": survival time must be positive and finite");
        }
        if (treatment_[i] > 1) {
            throw std::domain_error("record " + std::to_string(i + 1) +
                                    ": treatment indicator must be 0 or 1");
        }
    }
}

double log_survival(Family family, double t, double eta, std::optional<double> gamma) {
    const double shape = validate_point_args(family, t, eta, gamma);
    return log_survival_kernel(family, std::log(t) - eta, shape);
}

double log_hazard(Family family, double t, double eta, std::optional<double> gamma) {
    const double shape = validate_point_args(family, t, eta, gamma);
    return log_hazard_kernel(family, std::log(t) - eta, eta, shape);
}

double quantile(Family family, double p, double eta, std::optional<double> gamma) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
    const double shape = validate_point_args(family, 1.0, eta, gamma);
    switch (family) {
        case Family::Exponential:
            return std::exp(eta) * (-std::log1p(-p));
        case Family::Weibull:
            return std::exp(eta + std::log(-std::log1p(-p)) / shape);
        case Family::LogNormal:
            return std::exp(eta + shape * special::normal_quantile(p));
        case Family::LogLogistic:
            return std::exp(eta + (std::log(p) - std::log1p(-p)) / shape);
        case Family::Gamma:
            return std::exp(eta) * special::gamma_p_inverse(shape, p);
    }
    return 0.0;  // unreachable
}

double sample_time(Family family, double eta, std::optional<double> gamma, Rng& rng) {
    return quantile(family, rng.uniform01(), eta, gamma);
}

double log_likelihood(const SurvivalData& data, Family family, const ParamVector& params) {
    const double shape = validate_params(family, params);
    const double eta_by_arm[2] = {params.alpha, params.alpha + params.beta};
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double eta = eta_by_arm[data.treatment(i)];
        const double w = std::log(data.time(i)) - eta;
        // Event records contribute h * S = f; censored ones contribute S.
        total += data.event(i) ? log_density_kernel(family, w, eta, shape)
                               : log_survival_kernel(family, w, shape);
    }
    return total;
}

LikelihoodContext::LikelihoodContext(const SurvivalData& data, Family family) : family_(family) {
    n_records_ = data.size();
    std::vector<std::tuple<double, std::uint8_t, std::uint8_t>> keys;
    keys.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        keys.emplace_back(data.time(i), data.event(i) ? 1 : 0,
                          static_cast<std::uint8_t>(data.treatment(i)));
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        log_time_.push_back(std::log(std::get<0>(keys[i])));
        event_.push_back(std::get<1>(keys[i]));
        treatment_.push_back(std::get<2>(keys[i]));
        count_.push_back(static_cast<double>(j - i));
        i = j;
    }
}

double LikelihoodContext::operator()(const ParamVector& params) const {
    const double shape = validate_params(family_, params);
    const double eta_by_arm[2] = {params.alpha, params.alpha + params.beta};
    double total = 0.0;
    for (std::size_t g = 0; g < log_time_.size(); ++g) {
        const double eta = eta_by_arm[treatment_[g]];
        const double w = log_time_[g] - eta;
        const double term = event_[g] ? log_density_kernel(family_, w, eta, shape)
                                      : log_survival_kernel(family_, w, shape);
        total += count_[g] * term;
    }
    return total;
}

}  // namespace survbma
