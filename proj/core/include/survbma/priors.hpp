#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survbma/families.hpp"
#include "survbma/rng.hpp"

namespace survbma {

enum class PriorKind { Normal, TruncatedNormal, LogNormal, Cauchy, HalfCauchy, Spike };

/// A one-dimensional prior. Spike priors are point masses with zero free
/// dimensions: the spiked parameter is fixed and never sampled, so density
/// evaluation of a Spike is a contract violation.
class PriorSpec {
  public:
    static PriorSpec normal(double mu, double sigma);
    static PriorSpec truncated_normal(double mu, double sigma, double lower, double upper);
    static PriorSpec log_normal(double mu_log, double sigma_log);
    static PriorSpec cauchy(double location, double scale);
    static PriorSpec half_cauchy(double scale);
    static PriorSpec spike(double value);

    PriorKind kind() const { return kind_; }
    bool is_spike() const { return kind_ == PriorKind::Spike; }
    double spike_value() const;

    /// First/second shape parameter: (mu, sigma), (mu_log, sigma_log),
    /// (location, scale), (value, 0) for Spike.
    double param1() const { return a_; }
    double param2() const { return b_; }
    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }

    /// Normalized log density; -inf outside the support. Throws
    /// std::logic_error when evaluated on a Spike.
    double log_density(double x) const;

    double cdf(double x) const;
    double sample(Rng& rng) const;

    /// Analytic mean/sd; NaN when undefined (Cauchy kinds).
    double mean() const;
    double sd() const;

    /// Location/scale equivalents used to clamp sampler initial values.
    double clamp_center() const;
    double clamp_spread() const;

    double support_lower() const;
    double support_upper() const;

    bool operator==(const PriorSpec&) const = default;

  private:
    PriorKind kind_ = PriorKind::Spike;
    double a_ = 0.0;
    double b_ = 0.0;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// One member of a model ensemble: a parametric family, its priors, and a
/// prior model weight.
struct ModelSpec {
    Family family = Family::Exponential;
    PriorSpec beta;
    PriorSpec alpha;
    std::optional<PriorSpec> gamma;
    double weight = 1.0;

    /// True for models assuming the presence of the treatment effect.
    bool has_free_beta() const { return !beta.is_spike(); }

    void validate() const;
};

/// Validates a full ensemble: weights in (0, 1] summing to 1 within 1e-6.
void validate_ensemble(const std::vector<ModelSpec>& models);

}  // namespace survbma
