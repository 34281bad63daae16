#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "survbma/config.hpp"
#include "survbma/csv.hpp"
#include "survbma/errors.hpp"
#include "survbma/report.hpp"
#include "survbma/special.hpp"

namespace survbma::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string config_path;
    std::string data_path;
    std::string out_path;
    std::string curves_path;
    std::string trajectory_path;
    std::string log_path;
    std::optional<std::uint64_t> seed_override;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
};

void emit(std::ostream& out, const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        out << text;
    } else {
        write_atomic(out_path, text);
    }
}

AnalysisConfig load(const CommonOptions& opt) {
    AnalysisConfig cfg = load_config(opt.config_path);
    if (opt.seed_override.has_value()) cfg.seed = *opt.seed_override;
    return cfg;
}

SurvivalData load_data(const CommonOptions& opt, std::ostream& err) {
    SurvivalData data = ingest_csv(opt.data_path);
    JsonWriter w;
    w.begin_object();
    w.key("info").value("data");
    w.key("records").value(data.size());
    w.key("events").value(data.num_events());
    w.key("comparator_arm").value(data.num_in_arm(0));
    w.key("experimental_arm").value(data.num_in_arm(1));
    w.end_object();
    err << w.str() << "\n";
    return data;
}

BetaSummary summarize(const WeightedDraws& draws) {
    BetaSummary s;
    s.mean = draws.mean();
    s.median = draws.quantile(0.5);
    s.lower = draws.quantile(0.025);
    s.upper = draws.quantile(0.975);
    return s;
}

std::vector<double> curve_grid(const AnalysisConfig& cfg, const SurvivalData& data) {
    double from = 30.0;
    double to = std::max(60.0, data.max_time());
    int points = 50;
    if (cfg.curve_grid.has_value()) {
        from = cfg.curve_grid->from_days;
        to = cfg.curve_grid->to_days;
        points = cfg.curve_grid->points;
    }
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = from + (to - from) * static_cast<double>(i) / (points - 1);
    }
    return grid;
}

int cmd_fit(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    const AnalysisConfig cfg = load(opt);
    const SurvivalData data = load_data(opt, err);
    const bool both_arms = data.num_in_arm(0) > 0 && data.num_in_arm(1) > 0;
    std::vector<MleFit> fits;
    for (Family f : cfg.families) fits.push_back(fit_mle(f, data, both_arms));
    const std::size_t aic_choice = select_model(fits, SelectionCriterion::AIC);
    const std::size_t bic_choice = select_model(fits, SelectionCriterion::BIC);
    emit(out, mle_report_json(fits, aic_choice, bic_choice, 0.05), opt.out_path);
    return kExitOk;
}

int cmd_estimate_or_test(const CommonOptions& opt, std::ostream& out, std::ostream& err,
                         EnsembleMode mode) {
    AnalysisConfig cfg = load(opt);
    if (!cfg.mode.has_value() || *cfg.mode != mode) {
        throw ConfigError(mode == EnsembleMode::Estimation
                              ? "estimate requires a config with mode 'estimation'"
                              : "test requires a config with mode 'testing'");
    }
    validate_mode_models(mode, cfg.models);
    const SurvivalData data = load_data(opt, err);

    const EnsembleResult result = fit_ensemble(cfg.ensemble(), data, cfg.seed, opt.threads);

    // Mixture posterior of beta over the effect models.
    std::vector<PosteriorFit> effect_fits;
    std::vector<double> effect_probs;
    for (std::size_t m = 0; m < result.models.size(); ++m) {
        if (result.models[m].has_free_beta()) {
            effect_fits.push_back(result.fits[m]);
            effect_probs.push_back(result.posterior_probs[m]);
        }
    }
    std::optional<BetaSummary> beta;
    const double total = std::accumulate(effect_probs.begin(), effect_probs.end(), 0.0);
    if (!effect_fits.empty() && total > 0.0) {
        // Renormalize only when the effect models are a strict subset, so an
        // estimation ensemble reproduces the module's mixture bit-for-bit.
        if (effect_fits.size() < result.models.size()) {
            for (double& p : effect_probs) p /= total;
        }
        beta = summarize(mixture_posterior_beta(effect_fits, effect_probs));
    }
    emit(out, ensemble_report_json(result, beta), opt.out_path);

    if (!opt.curves_path.empty()) {
        const auto grid = curve_grid(cfg, data);
        const auto comparator = model_averaged_survival(grid, result.models, result.fits,
                                                        result.posterior_probs, 0);
        const auto experimental = model_averaged_survival(grid, result.models, result.fits,
                                                          result.posterior_probs, 1);
        write_atomic(opt.curves_path, curves_csv(comparator, experimental));
    }
    return kExitOk;
}

int cmd_sequential(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    AnalysisConfig cfg = load(opt);
    if (!cfg.mode.has_value() || *cfg.mode != EnsembleMode::Testing) {
        throw ConfigError("sequential requires a config with mode 'testing'");
    }
    validate_mode_models(EnsembleMode::Testing, cfg.models);
    if (!cfg.thresholds.has_value()) throw ConfigError("sequential requires 'thresholds'");
    if (!cfg.schedule.has_value()) throw ConfigError("sequential requires 'schedule'");
    const SurvivalData data = load_data(opt, err);

    const EvidenceTrajectory traj = run_sequential(data, cfg.ensemble(), *cfg.schedule,
                                                   *cfg.thresholds, cfg.seed, opt.threads);
    const std::string csv = trajectory_csv(traj);
    if (!opt.trajectory_path.empty()) write_atomic(opt.trajectory_path, csv);

    JsonWriter w;
    w.begin_object();
    w.key("decision").value(traj.decision == Decision::AcceptH1   ? "accept_h1"
                            : traj.decision == Decision::AcceptH0 ? "accept_h0"
                                                                  : "undecided");
    w.key("decision_time_days");
    if (traj.decision_time.has_value()) w.value(*traj.decision_time); else w.null_value();
    w.key("looks").value(traj.look_times.size());
    w.key("last_bf10").value(traj.last_bf10);
    w.end_object();
    emit(out, w.str() + "\n", opt.out_path);
    return kExitOk;
}

BfdaScenario scenario_for(const AnalysisConfig& cfg, Hypothesis hypothesis,
                          const BfdaSection& section) {
    BfdaScenario scenario;
    scenario.generating = cfg.generating_models(hypothesis);
    scenario.hypothesis = hypothesis;
    scenario.n_participants = section.n_participants;
    scenario.censoring = section.censoring;
    scenario.replications = section.replications;
    scenario.design = section.design;
    if (section.design == DesignKind::Sequential) {
        if (!cfg.schedule.has_value()) {
            throw ConfigError("sequential BFDA requires a 'schedule' section");
        }
        scenario.schedule = *cfg.schedule;
    }
    scenario.master_seed =
        derive_seed(cfg.seed, hypothesis == Hypothesis::H0 ? 0xB0ULL : 0xB1ULL);
    return scenario;
}

int cmd_bfda(const CommonOptions& opt, std::ostream& out) {
    AnalysisConfig cfg = load(opt);
    if (!cfg.mode.has_value() || *cfg.mode != EnsembleMode::Testing) {
        throw ConfigError("bfda requires a config with mode 'testing'");
    }
    validate_mode_models(EnsembleMode::Testing, cfg.models);
    if (!cfg.bfda.has_value()) throw ConfigError("bfda requires a 'bfda' section");
    const BfdaSection& section = *cfg.bfda;

    BfdaAnalysisConfig analysis;
    analysis.analysis = cfg.ensemble();
    analysis.leave_one_family_out = section.leave_one_family_out;
    analysis.n_threads = opt.threads;
    if (section.design == DesignKind::Sequential && section.truncate_bf) {
        analysis.truncation = BfTruncation{};
    }

    const BfdaScenario h0 = scenario_for(cfg, Hypothesis::H0, section);
    const BfdaScenario h1 = scenario_for(cfg, Hypothesis::H1, section);
    const BfdaResult result = run_bfda(h0, h1, analysis);

    CalibrationResult calibration;
    if (section.design == DesignKind::FixedN) {
        calibration = calibrate_fixed(result.bf_samples(Hypothesis::H0),
                                      result.bf_samples(Hypothesis::H1), section.alpha,
                                      section.beta);
    } else {
        std::vector<EvidenceTrajectory> t0, t1;
        for (const auto& r : result.h0) t0.push_back(r.trajectory);
        for (const auto& r : result.h1) t1.push_back(r.trajectory);
        const double cap = section.truncate_bf ? BfTruncation{}.high : 1000.0;
        calibration = calibrate_sequential(t0, t1, section.alpha, section.beta, cap);
    }

    double rate_ge_10 = 0.0;
    const auto bf_h0 = result.bf_samples(Hypothesis::H0);
    if (!bf_h0.empty()) {
        for (double bf : bf_h0) rate_ge_10 += (bf >= 10.0) ? 1.0 : 0.0;
        rate_ge_10 /= static_cast<double>(bf_h0.size());
    }

    if (!opt.log_path.empty()) {
        write_atomic(opt.log_path, bfda_ndjson(result, cfg.thresholds));
    }
    emit(out, bfda_report_json(result, calibration, section.alpha, section.beta, rate_ge_10),
         opt.out_path);
    return kExitOk;
}

int cmd_map_prior(const CommonOptions& opt, std::ostream& out) {
    AnalysisConfig cfg = load(opt);
    if (!cfg.map_prior.has_value()) throw ConfigError("map-prior requires a 'map_prior' section");
    const MapPriorSection& section = *cfg.map_prior;

    std::vector<SurvivalData> historical;
    for (const auto& path : section.historical_data) historical.push_back(ingest_csv(path));

    MetaAnalysisOptions options;
    options.fix_tau_to_zero = section.tau_fixed_zero;

    std::vector<MapPriorFamilyResult> results;
    for (Family f : section.families) {
        const FamilyStudyEstimates estimates = study_estimates(f, historical);
        if (estimates.alpha.empty()) {
            throw NumericError(std::string("no historical study could be fitted for family ") +
                               std::string(family_name(f)));
        }
        MapPriorFamilyResult r;
        r.family = f;
        r.warnings = estimates.warnings;
        SamplerSettings settings = cfg.sampler;
        settings.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(f) * 2);
        r.alpha = meta_analyze(estimates.alpha, settings, PredictiveScale::Intercept, options);
        if (family_has_shape(f)) {
            settings.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(f) * 2 + 1);
            r.log_gamma =
                meta_analyze(estimates.log_gamma, settings, PredictiveScale::LogShape, options);
        }
        results.push_back(std::move(r));
    }
    emit(out, map_prior_fragment_json(results), opt.out_path);
    return kExitOk;
}

int cmd_simulate(const CommonOptions& opt, std::ostream& out) {
    AnalysisConfig cfg = load(opt);
    if (!cfg.simulate.has_value()) throw ConfigError("simulate requires a 'simulate' section");
    const SimulateSection& section = *cfg.simulate;

    BfdaScenario scenario;
    scenario.generating = cfg.generating_models(section.hypothesis);
    scenario.hypothesis = section.hypothesis;
    scenario.n_participants = section.n_participants;
    scenario.censoring = section.censoring;
    scenario.replications = section.replication + 1;
    scenario.design = DesignKind::FixedN;
    scenario.master_seed = cfg.seed;

    const SurvivalData data = simulate_trial(scenario, section.replication);
    if (opt.out_path.empty()) throw ConfigError("simulate requires --out for the CSV");
    write_csv(data, opt.out_path);

    JsonWriter w;
    w.begin_object();
    w.key("records").value(data.size());
    w.key("events").value(data.num_events());
    w.key("generating_family")
        .value(std::string(family_name(generating_family(scenario, section.replication))));
    w.end_object();
    out << w.str() << "\n";
    return kExitOk;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    JsonWriter w;
    w.begin_object();
    w.key("error").value(kind);
    w.key("message").value(message);
    w.end_object();
    err << w.str() << std::endl;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian model-averaged parametric survival analysis"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto add_common = [&](CLI::App* sub, bool needs_data) {
        sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
        if (needs_data) {
            sub->add_option("--data", opt.data_path, "input CSV (time,event,group)")->required();
        }
        sub->add_option("--out", opt.out_path, "output report path (default: stdout)");
        sub->add_option("--seed", opt.seed_override, "seed override");
        sub->add_option("--threads", opt.threads, "worker threads");
        return sub;
    };

    auto* fit = add_common(app.add_subcommand("fit", "maximum-likelihood fits with AIC/BIC"), true);
    auto* estimate =
        add_common(app.add_subcommand("estimate", "model-averaged effect estimation"), true);
    estimate->add_option("--curves", opt.curves_path, "survival-curve CSV output");
    auto* test = add_common(app.add_subcommand("test", "model-averaged hypothesis test"), true);
    test->add_option("--curves", opt.curves_path, "survival-curve CSV output");
    auto* sequential =
        add_common(app.add_subcommand("sequential", "sequential evidence monitoring"), true);
    sequential->add_option("--trajectory", opt.trajectory_path, "trajectory CSV output");
    auto* bfda = add_common(app.add_subcommand("bfda", "Bayes factor design analysis"), false);
    bfda->add_option("--log", opt.log_path, "replication NDJSON log");
    auto* map_prior =
        add_common(app.add_subcommand("map-prior", "meta-analytic predictive priors"), false);
    auto* simulate = add_common(app.add_subcommand("simulate", "write a simulated dataset"), false);

    std::vector<const char*> argv;
    argv.push_back("survbma");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        err << app.help();
        return kExitConfig;
    }

    if (opt.threads < 1) opt.threads = 1;

    try {
        if (app.got_subcommand(fit)) return cmd_fit(opt, out, err);
        if (app.got_subcommand(estimate)) {
            return cmd_estimate_or_test(opt, out, err, EnsembleMode::Estimation);
        }
        if (app.got_subcommand(test)) {
            return cmd_estimate_or_test(opt, out, err, EnsembleMode::Testing);
        }
        if (app.got_subcommand(sequential)) return cmd_sequential(opt, out, err);
        if (app.got_subcommand(bfda)) return cmd_bfda(opt, out);
        if (app.got_subcommand(map_prior)) return cmd_map_prior(opt, out);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt, out);
        report_error(err, "usage", "unknown subcommand");
        return kExitConfig;
    } catch (const ConfigError& e) {
        report_error(err, "config", e.what());
        return kExitConfig;
    } catch (const NumericError& e) {
        report_error(err, "numeric", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kExitNumeric;
    }
}

}  // namespace survbma::cli
