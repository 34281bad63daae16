#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "survbma/rng.hpp"

namespace survbma {

/// The five accelerated-failure-time parametric families.
enum class Family { Exponential, Weibull, LogNormal, LogLogistic, Gamma };

inline constexpr std::array<Family, 5> kAllFamilies = {
    Family::Exponential, Family::Weibull, Family::LogNormal, Family::LogLogistic, Family::Gamma};

/// True when the family carries an auxiliary shape parameter gamma (> 0).
bool family_has_shape(Family family);

std::string_view family_name(Family family);
Family family_from_name(std::string_view name);

/// Regression parameters on the AFT scale: the linear predictor is
/// eta = alpha + beta * treatment, survival times scale as T = e^eta * T0
/// with T0 the unit-scale baseline.
struct ParamVector {
    double beta = 0.0;
    double alpha = 0.0;
    std::optional<double> gamma;
};

/// Right-censored survival data with a binary treatment indicator.
/// Times are in days and strictly positive; event == true means observed.
class SurvivalData {
  public:
    void add(double time, bool event, int treatment);
    std::size_t size() const { return time_.size(); }
    bool empty() const { return time_.empty(); }

    double time(std::size_t i) const { return time_[i]; }
    bool event(std::size_t i) const { return event_[i] != 0; }
    int treatment(std::size_t i) const { return treatment_[i]; }

    std::size_t num_events() const;
    std::size_t num_in_arm(int treatment) const;
    double max_time() const;

    /// Throws std::domain_error on non-positive/non-finite times or
    /// treatments outside {0, 1}.
    void validate() const;

  private:
    std::vector<double> time_;
    std::vector<std::uint8_t> event_;
    std::vector<std::uint8_t> treatment_;
};

/// log S(t | eta, gamma). AFT contract: equals log S(t * e^-eta | 0, gamma).
double log_survival(Family family, double t, double eta, std::optional<double> gamma = {});

/// log h(t | eta, gamma) = log f - log S; finite wherever S > 0.
double log_hazard(Family family, double t, double eta, std::optional<double> gamma = {});

/// t such that 1 - S(t) = p; monotone in p, relative tolerance 1e-10.
double quantile(Family family, double p, double eta, std::optional<double> gamma = {});

/// Inverse-CDF draw: quantile(U) with U from the caller-owned stream.
double sample_time(Family family, double eta, std::optional<double> gamma, Rng& rng);

/// Censored log-likelihood: sum over records of
/// I(event) * log h(t_i | eta_i, gamma) + log S(t_i | eta_i, gamma),
/// with eta_i = alpha + beta * treatment_i.
double log_likelihood(const SurvivalData& data, Family family, const ParamVector& params);

/// Likelihood evaluator for repeated calls (MCMC, MLE): collapses duplicate
/// (time, event, treatment) records into counted groups. The grouped sum can
/// differ from log_likelihood in the last bits but is deterministic.
class LikelihoodContext {
  public:
    LikelihoodContext(const SurvivalData& data, Family family);

    double operator()(const ParamVector& params) const;
    Family family() const { return family_; }
    std::size_t num_records() const { return n_records_; }
    std::size_t num_groups() const { return log_time_.size(); }

  private:
    Family family_;
    std::size_t n_records_ = 0;
    std::vector<double> log_time_;
    std::vector<double> count_;
    std::vector<std::uint8_t> event_;
    std::vector<std::uint8_t> treatment_;
};

}  // namespace survbma
