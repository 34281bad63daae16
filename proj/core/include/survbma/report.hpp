#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survbma/bfda.hpp"
#include "survbma/ensemble.hpp"
#include "survbma/map_prior.hpp"
#include "survbma/mle.hpp"
#include "survbma/sequential.hpp"

namespace survbma {

/// Minimal JSON writer with caller-controlled key order and doubles rendered
/// at 17 significant digits, so identical inputs give byte-identical reports.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v);
    JsonWriter& null_value();

    const std::string& str() const { return out_; }
    static std::string format_double(double v);

  private:
    void separator();
    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_key_ = false;
};

/// Writes text to `path` atomically (temp file in the same directory, then
/// rename).
void write_atomic(const std::string& path, const std::string& text);

struct BetaSummary {
    double mean = 0.0;
    double median = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Per-model table (prior prob, posterior prob, log marglik, inclusion BF)
/// plus ensemble summaries. Throws NumericError when the posterior
/// probabilities fail to sum to 1 within 1e-9.
std::string ensemble_report_json(const EnsembleResult& result,
                                 const std::optional<BetaSummary>& beta);

std::string mle_report_json(const std::vector<MleFit>& fits, std::size_t aic_choice,
                            std::size_t bic_choice, double one_sided_alpha);

/// Trajectory CSV: look_time_days, bf10, one probability column per family,
/// decision_flag.
std::string trajectory_csv(const EvidenceTrajectory& trajectory);

/// Survival-curve CSV series for both arms.
std::string curves_csv(const AveragedCurve& comparator, const AveragedCurve& experimental);

/// One NDJSON line per replication: seed, decision, time, BF, estimates.
std::string bfda_ndjson(const BfdaResult& result,
                        const std::optional<DecisionThresholds>& thresholds);

std::string bfda_report_json(const BfdaResult& result, const CalibrationResult& calibration,
                             double alpha, double beta, double rate_bf10_ge_10_under_h0);

struct MapPriorFamilyResult {
    Family family = Family::Exponential;
    MetaAnalyticPrior alpha;
    std::optional<MetaAnalyticPrior> log_gamma;
    std::vector<std::string> warnings;
};

/// Config fragment with the predictive priors per family, consumable by the
/// ensemble configuration.
std::string map_prior_fragment_json(const std::vector<MapPriorFamilyResult>& results);

}  // namespace survbma
