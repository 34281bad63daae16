#pragma once

#include <cstdint>
#include <vector>

#include "survbma/matrix.hpp"
#include "survbma/sampler.hpp"

namespace survbma {

struct BridgeResult {
    double log_marglik = 0.0;
    int iterations_used = 0;
    double relative_change_at_stop = 0.0;
    std::vector<double> proposal_mean;  // unconstrained space
    Matrix proposal_cov;
};

/// Iterative optimal-bridge estimate of the log marginal likelihood.
/// The first half of the posterior draws fits the moment-matched normal
/// proposal; the second half enters the estimator together with an equal
/// number of proposal draws. Zero-dimensional fits bypass iteration.
BridgeResult bridge_marglik(const PosteriorFit& fit, const ModelSpec& model,
                            const SurvivalData& data, std::uint64_t seed);

/// Same estimator against an arbitrary target (used by the meta-analysis too).
BridgeResult bridge_marglik_target(const PosteriorFit& fit, const McmcTarget& target,
                                   std::uint64_t seed);

}  // namespace survbma
