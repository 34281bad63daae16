#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "survbma/families.hpp"
#include "survbma/matrix.hpp"
#include "survbma/priors.hpp"

namespace survbma {

struct SamplerSettings {
    int chains = 2;
    int burnin = 1000;
    int samples = 5000;  // kept iterations per chain
    double target_acceptance = 0.44;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Map between a constrained parameter and its unconstrained sampling space.
class Transform {
  public:
    enum class Kind { Identity, LowerBounded, UpperBounded, Interval };

    static Transform for_prior(const PriorSpec& prior);

    double to_unconstrained(double x) const;
    double to_constrained(double z) const;
    double log_jacobian(double z) const;
    Kind kind() const { return kind_; }

  private:
    Kind kind_ = Kind::Identity;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// One free (non-spike) parameter of an MCMC target.
struct FreeParam {
    std::string name;
    PriorSpec prior;
    Transform transform;
};

/// Generic target: free parameters with priors plus a log-likelihood over the
/// constrained parameter vector. The unconstrained log target adds prior
/// densities and transform Jacobians.
struct McmcTarget {
    std::vector<FreeParam> params;
    std::function<double(std::span<const double>)> log_likelihood;

    std::size_t dim() const { return params.size(); }
    void constrain(std::span<const double> z, std::span<double> x) const;
    double log_density_unconstrained(std::span<const double> z, std::span<double> scratch) const;
};

struct PosteriorFit {
    std::vector<std::string> names;
    Matrix draws;                // kept draws x free dimension, constrained space
    Matrix draws_unconstrained;  // same draws in sampling space
    std::vector<double> log_posterior;  // unnormalized log target per kept draw
    std::vector<double> rhat;
    std::vector<double> ess;
    std::vector<std::string> warnings;
    int chains = 0;
    int samples_per_chain = 0;
    double const_log_posterior = 0.0;  // zero-dimensional models: log-lik at the spikes

    std::size_t free_dim() const { return names.size(); }
    std::size_t kept() const { return draws.rows(); }
    double mean(std::size_t j) const;
    double sd(std::size_t j) const;
};

/// Runs componentwise adaptive random-walk Metropolis on `target`:
/// Robbins-Monro step adaptation toward the target acceptance during burn-in,
/// frozen afterwards; split-Rhat and ESS computed over kept draws.
PosteriorFit run_mwg(const McmcTarget& target, const SamplerSettings& settings);

/// Assembles the free parameters for one survival model. Order: beta (if
/// free), alpha (if free), gamma (if present and free).
McmcTarget build_posterior_target(const ModelSpec& model, const LikelihoodContext& likelihood);

/// Posterior sampling for one survival model; empty data yields prior draws.
PosteriorFit sample_posterior(const ModelSpec& model, const SurvivalData& data,
                              const SamplerSettings& settings);

/// Reconstruct the full parameter vector from free values plus spikes.
ParamVector assemble_params(const ModelSpec& model, std::span<const double> free_values);

/// Convergence diagnostics over split chains.
double split_rhat(std::span<const double> draws, int chains);
double split_ess(std::span<const double> draws, int chains);

}  // namespace survbma
