#include "survbma/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "survbma/errors.hpp"
#include "survbma/rng.hpp"
#include "survbma/special.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kTolerance = 1e-10;
constexpr int kMaxIterations = 1000;

// Lower-triangular Cholesky factor; throws on non-positive-definite input.
Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = a(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(acc > 0.0)) {
                    throw NumericError(
                        "bridge sampling: singular proposal covariance; increase posterior draws");
                }
                l(i, i) = std::sqrt(acc);
            } else {
                l(i, j) = acc / l(j, j);
            }
        }
    }
    return l;
}

struct MvnProposal {
    std::vector<double> mean;
    Matrix chol;
    double log_norm;  // -0.5 * (d log 2pi + log det)

    double log_density(std::span<const double> x, std::span<double> work) const {
        const std::size_t d = mean.size();
        // Solve L y = x - mean by forward substitution.
        for (std::size_t i = 0; i < d; ++i) {
            double acc = x[i] - mean[i];
            for (std::size_t k = 0; k < i; ++k) acc -= chol(i, k) * work[k];
            work[i] = acc / chol(i, i);
        }
        double quad = 0.0;
        for (std::size_t i = 0; i < d; ++i) quad += work[i] * work[i];
        return log_norm - 0.5 * quad;
    }

    void sample(Rng& rng, std::span<double> out, std::span<double> work) const {
        const std::size_t d = mean.size();
        for (std::size_t i = 0; i < d; ++i) work[i] = rng.normal();
        for (std::size_t i = 0; i < d; ++i) {
            double acc = mean[i];
            for (std::size_t k = 0; k <= i; ++k) acc += chol(i, k) * work[k];
            out[i] = acc;
        }
    }
};

}  // namespace

BridgeResult bridge_marglik_target(const PosteriorFit& fit, const McmcTarget& target,
                                   std::uint64_t seed) {
    BridgeResult result;
    const std::size_t d = fit.free_dim();
    if (d == 0) {
        result.log_marglik = fit.const_log_posterior;
        return result;
    }

    const std::size_t n = fit.kept();
    if (n < 1000 * d) {
        throw NumericError("bridge sampling requires at least 1000 kept draws per free dimension");
    }
    const std::size_t n1 = n / 2;       // proposal-fitting half
    const std::size_t n2 = n - n1;      // estimation half

    // Moment-match the proposal on the first half, in unconstrained space.
    MvnProposal proposal;
    proposal.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n1; ++r) {
        for (std::size_t j = 0; j < d; ++j) proposal.mean[j] += fit.draws_unconstrained(r, j);
    }
    for (double& m : proposal.mean) m /= static_cast<double>(n1);

    Matrix cov(d, d, 0.0);
    for (std::size_t r = 0; r < n1; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dj = fit.draws_unconstrained(r, j) - proposal.mean[j];
            for (std::size_t k = 0; k <= j; ++k) {
                cov(j, k) += dj * (fit.draws_unconstrained(r, k) - proposal.mean[k]);
            }
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k <= j; ++k) {
            cov(j, k) /= static_cast<double>(n1 - 1);
            cov(k, j) = cov(j, k);
        }
    }
    proposal.chol = cholesky(cov);
    double log_det = 0.0;
    for (std::size_t j = 0; j < d; ++j) log_det += 2.0 * std::log(proposal.chol(j, j));
    proposal.log_norm = -0.5 * (static_cast<double>(d) * kLog2Pi + log_det);

    // l1: posterior second half; l2: fresh proposal draws.
    std::vector<double> work(d), point(d), scratch(d);
    std::vector<double> l1(n2), l2(n2);
    for (std::size_t i = 0; i < n2; ++i) {
        const auto row = fit.draws_unconstrained.row(n1 + i);
        l1[i] = fit.log_posterior[n1 + i] - proposal.log_density(row, work);
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < n2; ++i) {
        proposal.sample(rng, point, work);
        const double lq = target.log_density_unconstrained(point, scratch);
        l2[i] = (lq == -kInf) ? -kInf : lq - proposal.log_density(point, work);
    }

    // Shift by the median of l1 for stability; iterate the optimal-bridge
    // fixed point entirely in log space.
    std::vector<double> sorted_l1(l1);
    std::nth_element(sorted_l1.begin(), sorted_l1.begin() + sorted_l1.size() / 2, sorted_l1.end());
    const double lstar = sorted_l1[sorted_l1.size() / 2];

    const double log_s1 = std::log(static_cast<double>(n2)) -
                          std::log(static_cast<double>(n2 + n2));
    const double log_s2 = log_s1;  // equal halves by construction
    const double log_n = std::log(static_cast<double>(n2));

    // Initial value: importance-sampling estimate from the proposal draws.
    std::vector<double> shifted_l2(n2), shifted_l1(n2);
    for (std::size_t i = 0; i < n2; ++i) shifted_l2[i] = l2[i] - lstar;
    for (std::size_t i = 0; i < n2; ++i) shifted_l1[i] = l1[i] - lstar;
    double log_r = special::log_sum_exp(shifted_l2) - log_n;
    if (!std::isfinite(log_r)) log_r = 0.0;

    double rel_change = kInf;
    int iter = 0;
    std::vector<double> terms(n2);
    for (; iter < kMaxIterations; ++iter) {
        for (std::size_t i = 0; i < n2; ++i) {
            terms[i] = (shifted_l2[i] == -kInf)
                           ? -kInf
                           : shifted_l2[i] -
                                 special::log_sum_exp(log_s1 + shifted_l2[i], log_s2 + log_r);
        }
        const double log_num = special::log_sum_exp(terms) - log_n;
        for (std::size_t i = 0; i < n2; ++i) {
            terms[i] = -special::log_sum_exp(log_s1 + shifted_l1[i], log_s2 + log_r);
        }
        const double log_den = special::log_sum_exp(terms) - log_n;
        const double log_r_new = log_num - log_den;
        rel_change = std::fabs(std::expm1(log_r_new - log_r));
        log_r = log_r_new;
        if (rel_change < kTolerance) {
            ++iter;
            break;
        }
    }
    if (rel_change >= kTolerance) {
        throw NumericError("bridge sampling did not converge within 1000 iterations (relative "
                           "change " + std::to_string(rel_change) + ")");
    }

    result.log_marglik = log_r + lstar;
    result.iterations_used = iter;
    result.relative_change_at_stop = rel_change;
    result.proposal_mean = proposal.mean;
    result.proposal_cov = cov;
    return result;
}

BridgeResult bridge_marglik(const PosteriorFit& fit, const ModelSpec& model,
                            const SurvivalData& data, std::uint64_t seed) {
    if (fit.free_dim() == 0) {
        BridgeResult result;
        result.log_marglik = fit.const_log_posterior;
        return result;
    }
    const LikelihoodContext likelihood(data, model.family);
    return bridge_marglik_target(fit, build_posterior_target(model, likelihood), seed);
}

}  // namespace survbma
