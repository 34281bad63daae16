#include "survbma/sequential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "survbma/errors.hpp"

namespace survbma {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kRetryTag = 0x5E71;

}  // namespace

void LookSchedule::validate() const {
    if (!(interval_days > 0.0) || !(horizon_days > 0.0)) {
        throw ConfigError("look schedule requires positive interval and horizon");
    }
    if (interval_days > horizon_days) {
        throw ConfigError("look interval must not exceed the horizon");
    }
}

std::vector<double> LookSchedule::look_times() const {
    validate();
    std::vector<double> times;
    for (int k = 1;; ++k) {
        const double t = interval_days * static_cast<double>(k);
        if (t >= horizon_days) break;
        times.push_back(t);
    }
    times.push_back(horizon_days);
    return times;
}

void DecisionThresholds::validate() const {
    if (!(bf10_upper > 1.0) || !(bf01_upper > 1.0)) {
        throw ConfigError("decision thresholds must both exceed 1");
    }
}

SurvivalData censor_at(const SurvivalData& data, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("censoring time must be positive");
    SurvivalData out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const bool within = data.time(i) <= tau;
        out.add(within ? data.time(i) : tau, data.event(i) && within, data.treatment(i));
    }
    return out;
}

EvidenceTrajectory run_sequential(const SurvivalData& data, const EnsembleConfig& config,
                                  const LookSchedule& schedule,
                                  const DecisionThresholds& thresholds, std::uint64_t master_seed,
                                  int n_threads, const std::optional<BfTruncation>& truncation) {
    thresholds.validate();
    validate_ensemble(config.models);

    EvidenceTrajectory traj;
    const std::vector<double> looks = schedule.look_times();

    for (std::size_t k = 0; k < looks.size(); ++k) {
        const double tau = looks[k];
        const std::uint64_t look_seed = derive_seed(master_seed, k + 1);
        const SurvivalData snapshot = censor_at(data, tau);

        double bf = kNan;
        std::array<double, 5> probs{};
        bool failed = false;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const std::uint64_t seed = attempt == 0 ? look_seed : derive_seed(look_seed, kRetryTag);
            try {
                const EnsembleResult res = fit_ensemble(config, snapshot, seed, n_threads);
                bf = res.bf10();
                probs.fill(0.0);
                for (std::size_t m = 0; m < res.models.size(); ++m) {
                    probs[static_cast<std::size_t>(res.models[m].family)] +=
                        res.posterior_probs[m];
                }
                failed = false;
                break;
            } catch (const NumericError&) {
                failed = true;
            }
        }

        traj.look_times.push_back(tau);
        traj.bf10.push_back(failed ? kNan : bf);
        traj.family_probs.push_back(failed ? std::array<double, 5>{kNan, kNan, kNan, kNan, kNan}
                                           : probs);
        traj.look_failed.push_back(failed ? 1 : 0);
        if (failed) continue;

        traj.last_bf10 = bf;
        if (bf >= thresholds.bf10_upper) {
            traj.decision = Decision::AcceptH1;
            traj.decision_time = tau;
            break;
        }
        if (1.0 / bf >= thresholds.bf01_upper) {
            traj.decision = Decision::AcceptH0;
            traj.decision_time = tau;
            break;
        }
        if (truncation.has_value() && (bf >= truncation->high || bf <= truncation->low)) {
            traj.truncated = true;
            break;
        }
    }
    return traj;
}

}  // namespace survbma
