#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "survbma/ensemble.hpp"

namespace survbma {

struct LookSchedule {
    double interval_days = 30.0;
    double horizon_days = 0.0;

    void validate() const;
    /// Look times: interval, 2*interval, ..., ending exactly at the horizon.
    std::vector<double> look_times() const;
};

struct DecisionThresholds {
    double bf10_upper = 0.0;  // accept H1 when BF10 >= this
    double bf01_upper = 0.0;  // accept H0 when 1/BF10 >= this

    void validate() const;
};

enum class Decision { Undecided, AcceptH1, AcceptH0 };

/// BFDA-only optimization: stop re-fitting once the BF leaves [low, high].
struct BfTruncation {
    double low = 1.0 / 15.0;
    double high = 15.0;
};

struct EvidenceTrajectory {
    std::vector<double> look_times;
    std::vector<double> bf10;                      // NaN for failed looks
    std::vector<std::array<double, 5>> family_probs;  // indexed by Family order
    std::vector<std::uint8_t> look_failed;
    Decision decision = Decision::Undecided;
    std::optional<double> decision_time;
    bool truncated = false;       // stopped early by a BfTruncation range
    double last_bf10 = 1.0;       // final recorded BF (truncation carries it forward)
};

/// Administrative censoring at tau: t' = min(t, tau), event' = event and
/// t <= tau. Idempotent and monotone in tau.
SurvivalData censor_at(const SurvivalData& data, double tau);

/// Re-fits the testing ensemble at every look on the data censored at the
/// look time, monitors the inclusion BF for the effect, and stops at the
/// first threshold crossing. Look k uses ensemble seed derive_seed(master, k)
/// (1-based), so per-model seeds are keyed by (master, look, model). A failed
/// look is retried once with a derived seed, then recorded as failed and
/// skipped.
EvidenceTrajectory run_sequential(const SurvivalData& data, const EnsembleConfig& config,
                                  const LookSchedule& schedule,
                                  const DecisionThresholds& thresholds, std::uint64_t master_seed,
                                  int n_threads = 1,
                                  const std::optional<BfTruncation>& truncation = {});

}  // namespace survbma
