#include "survbma/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

const char* decision_name(Decision d) {
    switch (d) {
        case Decision::AcceptH1: return "accept_h1";
        case Decision::AcceptH0: return "accept_h0";
        case Decision::Undecided: return "undecided";
    }
    return "?";
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return JsonWriter::format_double(v);
}

}  // namespace

std::string JsonWriter::format_double(double v) {
    if (std::isnan(v)) return "null";
    if (v == kInf) return "\"inf\"";
    if (v == -kInf) return "\"-inf\"";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void JsonWriter::separator() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!needs_comma_.empty()) {
        if (needs_comma_.back()) out_ += ',';
        needs_comma_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    out_ += '{';
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    needs_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separator();
    out_ += '[';
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    needs_comma_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    separator();
    out_ += '"';
    out_ += escape(name);
    out_ += "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separator();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    separator();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    separator();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    separator();
    out_ += '"';
    out_ += escape(v);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string(v)); }

JsonWriter& JsonWriter::null_value() {
    separator();
    out_ += "null";
    return *this;
}

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open output file: " + tmp.string());
        out << text;
        if (!out) throw ConfigError("failed writing: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw ConfigError("failed to move report into place: " + ec.message());
}

namespace {

void write_inclusion_bf(JsonWriter& w, const InclusionBf& bf) {
    w.begin_object();
    w.key("value").value(bf.value);
    w.key("degenerate").value(bf.degenerate);
    w.end_object();
}

void write_prior(JsonWriter& w, const PriorSpec& prior) {
    w.begin_object();
    switch (prior.kind()) {
        case PriorKind::Normal:
            w.key("kind").value("normal");
            w.key("mu").value(prior.param1());
            w.key("sigma").value(prior.param2());
            break;
        case PriorKind::TruncatedNormal:
            w.key("kind").value("normal");
            w.key("mu").value(prior.param1());
            w.key("sigma").value(prior.param2());
            if (prior.lower_bound() != -kInf) w.key("lower").value(prior.lower_bound());
            if (prior.upper_bound() != kInf) w.key("upper").value(prior.upper_bound());
            break;
        case PriorKind::LogNormal:
            w.key("kind").value("lognormal");
            w.key("mu_log").value(prior.param1());
            w.key("sigma_log").value(prior.param2());
            break;
        case PriorKind::Cauchy:
            w.key("kind").value("cauchy");
            w.key("location").value(prior.param1());
            w.key("scale").value(prior.param2());
            break;
        case PriorKind::HalfCauchy:
            w.key("kind").value("halfcauchy");
            w.key("scale").value(prior.param2());
            break;
        case PriorKind::Spike:
            w.key("kind").value("spike");
            w.key("value").value(prior.param1());
            break;
    }
    w.end_object();
}

}  // namespace

std::string ensemble_report_json(const EnsembleResult& result,
                                 const std::optional<BetaSummary>& beta) {
    const double total =
        std::accumulate(result.posterior_probs.begin(), result.posterior_probs.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-9) {
        throw NumericError("report: posterior model probabilities do not sum to 1");
    }

    JsonWriter w;
    w.begin_object();
    w.key("models").begin_array();
    for (std::size_t m = 0; m < result.models.size(); ++m) {
        const auto& model = result.models[m];
        w.begin_object();
        w.key("family").value(std::string(family_name(model.family)));
        w.key("beta_prior");
        write_prior(w, model.beta);
        w.key("alpha_prior");
        write_prior(w, model.alpha);
        w.key("gamma_prior");
        if (model.gamma.has_value()) write_prior(w, *model.gamma); else w.null_value();
        w.key("prior_prob").value(result.prior_probs[m]);
        w.key("posterior_prob").value(result.posterior_probs[m]);
        w.key("log_marglik").value(result.log_mls[m]);
        w.key("inclusion_bf");
        write_inclusion_bf(w, result.per_model_bf[m]);
        const auto& fit = result.fits[m];
        double rhat_max = 0.0;
        double ess_min = kInf;
        for (std::size_t j = 0; j < fit.free_dim(); ++j) {
            if (std::isfinite(fit.rhat[j])) rhat_max = std::max(rhat_max, fit.rhat[j]);
            ess_min = std::min(ess_min, fit.ess[j]);
        }
        w.key("rhat_max");
        if (fit.free_dim() == 0) w.null_value(); else w.value(rhat_max);
        w.key("ess_min");
        if (fit.free_dim() == 0) w.null_value(); else w.value(ess_min);
        w.end_object();
    }
    w.end_array();

    w.key("inclusion_bf_effect");
    if (result.has_effect_split) write_inclusion_bf(w, result.effect_bf); else w.null_value();

    w.key("family_inclusion_bf").begin_object();
    for (Family f : kAllFamilies) {
        const auto it = result.family_bf.find(f);
        if (it != result.family_bf.end()) {
            w.key(std::string(family_name(f)));
            write_inclusion_bf(w, it->second);
        }
    }
    w.end_object();

    w.key("beta_summary");
    if (beta.has_value()) {
        w.begin_object();
        w.key("mean").value(beta->mean);
        w.key("median").value(beta->median);
        w.key("ci_lower").value(beta->lower);
        w.key("ci_upper").value(beta->upper);
        w.end_object();
    } else {
        w.null_value();
    }

    w.key("warnings").begin_array();
    for (const auto& warning : result.warnings) w.value(warning);
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

std::string mle_report_json(const std::vector<MleFit>& fits, std::size_t aic_choice,
                            std::size_t bic_choice, double one_sided_alpha) {
    JsonWriter w;
    w.begin_object();
    w.key("fits").begin_array();
    for (const auto& fit : fits) {
        w.begin_object();
        w.key("family").value(std::string(family_name(fit.family)));
        w.key("beta");
        if (fit.includes_treatment) w.value(fit.estimates.beta); else w.null_value();
        w.key("alpha").value(fit.estimates.alpha);
        w.key("gamma");
        if (fit.estimates.gamma.has_value()) w.value(*fit.estimates.gamma); else w.null_value();
        w.key("se_beta");
        if (fit.includes_treatment) w.value(fit.se_beta); else w.null_value();
        w.key("se_alpha").value(fit.se_alpha);
        w.key("se_gamma");
        if (fit.estimates.gamma.has_value()) w.value(fit.se_gamma); else w.null_value();
        w.key("log_lik").value(fit.log_lik);
        w.key("aic").value(fit.aic);
        w.key("bic").value(fit.bic);
        w.key("converged").value(fit.converged);
        w.key("hessian_pd").value(fit.hessian_pd);
        w.key("wald_z");
        const double z = fit.wald_z();
        if (std::isnan(z)) w.null_value(); else w.value(z);
        w.key("wald_reject_h0");
        // One-sided test: reject when z exceeds the (1 - alpha) normal quantile.
        if (std::isnan(z)) w.null_value();
        else w.value(z > special::normal_quantile(1.0 - one_sided_alpha));
        w.end_object();
    }
    w.end_array();
    w.key("selected_aic").value(std::string(family_name(fits[aic_choice].family)));
    w.key("selected_bic").value(std::string(family_name(fits[bic_choice].family)));
    w.key("one_sided_alpha").value(one_sided_alpha);
    w.end_object();
    return w.str() + "\n";
}

std::string trajectory_csv(const EvidenceTrajectory& trajectory) {
    std::string out = "look_time_days,bf10";
    for (Family f : kAllFamilies) {
        out += ",prob_";
        out += std::string(family_name(f));
    }
    out += ",decision_flag\n";
    for (std::size_t k = 0; k < trajectory.look_times.size(); ++k) {
        out += csv_number(trajectory.look_times[k]);
        out += ',';
        out += csv_number(trajectory.bf10[k]);
        for (double p : trajectory.family_probs[k]) {
            out += ',';
            out += csv_number(p);
        }
        out += ',';
        const bool deciding = trajectory.decision != Decision::Undecided &&
                              trajectory.decision_time.has_value() &&
                              trajectory.look_times[k] == *trajectory.decision_time;
        if (trajectory.look_failed[k]) out += "failed";
        else if (deciding) out += decision_name(trajectory.decision);
        else out += "none";
        out += '\n';
    }
    return out;
}

std::string curves_csv(const AveragedCurve& comparator, const AveragedCurve& experimental) {
    std::string out =
        "time_days,survival_comparator,lower_comparator,upper_comparator,"
        "survival_experimental,lower_experimental,upper_experimental\n";
    for (std::size_t g = 0; g < comparator.grid.size(); ++g) {
        out += csv_number(comparator.grid[g]);
        out += ',';
        out += csv_number(comparator.mean[g]);
        out += ',';
        out += csv_number(comparator.lower[g]);
        out += ',';
        out += csv_number(comparator.upper[g]);
        out += ',';
        out += csv_number(experimental.mean[g]);
        out += ',';
        out += csv_number(experimental.lower[g]);
        out += ',';
        out += csv_number(experimental.upper[g]);
        out += '\n';
    }
    return out;
}

namespace {

void ndjson_record(std::string& out, const BfdaReplication& rep, Hypothesis hypothesis,
                   DesignKind design, const std::optional<DecisionThresholds>& thresholds) {
    JsonWriter w;
    w.begin_object();
    w.key("replication").value(rep.index);
    w.key("hypothesis").value(hypothesis == Hypothesis::H0 ? "h0" : "h1");
    w.key("seed").value(rep.seed);
    w.key("generating_family").value(std::string(family_name(rep.generating)));
    w.key("bf10").value(rep.bf10);
    if (design == DesignKind::FixedN) {
        w.key("beta_mean").value(rep.beta_mean);
        w.key("beta_ci_lower").value(rep.beta_lower);
        w.key("beta_ci_upper").value(rep.beta_upper);
    } else {
        w.key("looks").value(rep.trajectory.look_times.size());
        w.key("truncated").value(rep.trajectory.truncated);
        if (thresholds.has_value()) {
            const auto d = decide_trajectory(rep.trajectory, *thresholds);
            w.key("decision").value(decision_name(d.decision));
            w.key("decision_time_days");
            if (d.decision == Decision::Undecided) w.null_value(); else w.value(d.time);
        }
    }
    w.end_object();
    out += w.str();
    out += '\n';
}

}  // namespace

std::string bfda_ndjson(const BfdaResult& result,
                        const std::optional<DecisionThresholds>& thresholds) {
    std::string out;
    for (const auto& rep : result.h0) ndjson_record(out, rep, Hypothesis::H0, result.design, thresholds);
    for (const auto& rep : result.h1) ndjson_record(out, rep, Hypothesis::H1, result.design, thresholds);
    return out;
}

std::string bfda_report_json(const BfdaResult& result, const CalibrationResult& calibration,
                             double alpha, double beta, double rate_bf10_ge_10_under_h0) {
    JsonWriter w;
    w.begin_object();
    w.key("design").value(result.design == DesignKind::FixedN ? "fixed" : "sequential");
    w.key("replications_h0").value(result.h0.size());
    w.key("replications_h1").value(result.h1.size());
    w.key("failures_h0").value(result.failures_h0);
    w.key("failures_h1").value(result.failures_h1);
    w.key("alpha_target").value(alpha);
    w.key("beta_target").value(beta);
    w.key("calibration").begin_object();
    w.key("bf10_threshold").value(calibration.bf10_threshold);
    w.key("bf01_threshold").value(calibration.bf01_threshold);
    w.key("achieved_false_positive").value(calibration.achieved_false_positive);
    w.key("achieved_false_positive_se").value(calibration.achieved_false_positive_se);
    w.key("achieved_false_negative").value(calibration.achieved_false_negative);
    w.key("achieved_false_negative_se").value(calibration.achieved_false_negative_se);
    w.end_object();
    w.key("rate_bf10_ge_10_under_h0").value(rate_bf10_ge_10_under_h0);
    w.end_object();
    return w.str() + "\n";
}

std::string map_prior_fragment_json(const std::vector<MapPriorFamilyResult>& results) {
    JsonWriter w;
    w.begin_object();
    w.key("priors").begin_object();
    for (const auto& r : results) {
        w.key(std::string(family_name(r.family))).begin_object();
        w.key("alpha");
        write_prior(w, r.alpha.predictive);
        w.key("alpha_pooled_mean").value(r.alpha.pooled_mean);
        w.key("alpha_pooled_se").value(r.alpha.pooled_se);
        w.key("alpha_tau").value(r.alpha.tau);
        if (r.log_gamma.has_value()) {
            w.key("gamma");
            write_prior(w, r.log_gamma->predictive);
            w.key("gamma_pooled_mean_log").value(r.log_gamma->pooled_mean);
            w.key("gamma_pooled_se_log").value(r.log_gamma->pooled_se);
            w.key("gamma_tau_log").value(r.log_gamma->tau);
        }
        w.key("warnings").begin_array();
        for (const auto& warning : r.warnings) w.value(warning);
        w.end_array();
        w.end_object();
    }
    w.end_object();
    w.end_object();
    return w.str() + "\n";
}

}  // namespace survbma
