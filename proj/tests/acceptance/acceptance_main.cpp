// Acceptance suite: one pass/fail line per criterion. Exit code equals the
// number of failed criteria. --full switches the design-analysis criteria
// from the desk scale (n = 200, quarterly looks) to the full trial scale
// (n = 2070, monthly looks); expect hours in full mode.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ensembles.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "survbma/bfda.hpp"
#include "survbma/config.hpp"
#include "survbma/csv.hpp"
#include "survbma/ensemble.hpp"
#include "survbma/report.hpp"
#include "survbma/sequential.hpp"

using namespace survbma;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void criterion(int number, const std::string& name, const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.ok = false;
        check.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (check.ok) {
        std::printf("PASS criterion %d: %s (%.1f s)\n", number, name.c_str(), seconds);
    } else {
        ++failures;
        std::printf("FAIL criterion %d: %s (%.1f s) -- %s\n", number, name.c_str(), seconds,
                    check.detail.c_str());
    }
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

// ---------------------------------------------------------------------------
// Criterion 1: binomial Bayes factor worked example.

void criterion_binomial(Check& check) {
    const double log_choose = std::log(45.0);
    const double log_ml_0 = log_choose + 10.0 * std::log(0.5);
    const double log_ml_1 = log_choose + 8.0 * std::log(0.6) + 2.0 * std::log(0.4);
    const double log_ml_2 = log_choose + 8.0 * std::log(0.7) + 2.0 * std::log(0.3);
    const double bf10 = bayes_factor(log_ml_1, log_ml_0);
    const double bf20 = bayes_factor(log_ml_2, log_ml_0);
    check.require(std::fabs(bf10 - 2.75) <= 0.01, "BF10 = " + fmt(bf10) + ", expected 2.75");
    check.require(std::fabs(bf20 - 5.31) <= 0.01, "BF20 = " + fmt(bf20) + ", expected 5.31");
}

// ---------------------------------------------------------------------------
// Shared models for criteria 2 and 3.

ModelSpec exponential_oracle_model() {
    ModelSpec m;
    m.family = Family::Exponential;
    m.beta = PriorSpec::spike(0.0);
    m.alpha = PriorSpec::normal(8.0, 2.0);
    m.weight = 1.0;
    return m;
}

ModelSpec weibull_oracle_model() {
    ModelSpec m;
    m.family = Family::Weibull;
    m.beta = PriorSpec::spike(0.0);
    m.alpha = PriorSpec::normal(8.0, 2.0);
    m.gamma = PriorSpec::log_normal(0.0, 0.5);
    m.weight = 1.0;
    return m;
}

// Criterion 2: bridge sampling versus adaptive quadrature, 20 seeds each.

void criterion_bridge_oracle(Check& check) {
    const auto data = oracle::fixed_dataset(50, 1234);
    const auto truth_1d = oracle::exponential_alpha_posterior(data, 0.0, 8.0, 2.0);
    const auto truth_2d = oracle::weibull_posterior(data, 0.0, 8.0, 2.0, 0.0, 0.5, 1e-8);

    const auto exp_model = exponential_oracle_model();
    const auto wei_model = weibull_oracle_model();
    double worst_1d = 0.0, worst_2d = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SamplerSettings settings;
        settings.seed = derive_seed(100, seed);
        const auto fit1 = sample_posterior(exp_model, data, settings);
        const auto b1 = bridge_marglik(fit1, exp_model, data, derive_seed(settings.seed, 0xB51D));
        worst_1d = std::max(worst_1d, std::fabs(b1.log_marglik - truth_1d.log_marglik));
        const auto fit2 = sample_posterior(wei_model, data, settings);
        const auto b2 = bridge_marglik(fit2, wei_model, data, derive_seed(settings.seed, 0xB51D));
        worst_2d = std::max(worst_2d, std::fabs(b2.log_marglik - truth_2d.log_marglik));
    }
    check.require(worst_1d < 0.05,
                  "1-free-parameter exponential worst |bridge - quadrature| = " + fmt(worst_1d));
    check.require(worst_2d < 0.1,
                  "2-free-parameter Weibull worst |bridge - quadrature| = " + fmt(worst_2d));
}

// Criterion 3: sampler moments versus quadrature; prior recovery on empty data.

void criterion_sampler_oracle(Check& check) {
    const auto data = oracle::fixed_dataset(50, 1234);
    const auto truth_1d = oracle::exponential_alpha_posterior(data, 0.0, 8.0, 2.0);
    const auto truth_2d = oracle::weibull_posterior(data, 0.0, 8.0, 2.0, 0.0, 0.5, 1e-8);

    {
        SamplerSettings settings;
        settings.seed = 2024;
        const auto fit = sample_posterior(exponential_oracle_model(), data, settings);
        const double mcse_mean = oracle::mcse_mean(fit, 0);
        const double mcse_sd = oracle::mcse_sd(fit, 0);
        check.require(std::fabs(fit.mean(0) - truth_1d.mean) <= 3.0 * mcse_mean,
                      "exponential alpha mean " + fmt(fit.mean(0)) + " vs quadrature " +
                          fmt(truth_1d.mean));
        check.require(std::fabs(fit.sd(0) - truth_1d.sd) <= 3.0 * mcse_sd,
                      "exponential alpha sd " + fmt(fit.sd(0)) + " vs quadrature " +
                          fmt(truth_1d.sd));
    }
    {
        SamplerSettings settings;
        settings.seed = 2025;
        const auto fit = sample_posterior(weibull_oracle_model(), data, settings);
        const double truths[2] = {truth_2d.mean_alpha, truth_2d.mean_gamma};
        const double sds[2] = {truth_2d.sd_alpha, truth_2d.sd_gamma};
        for (std::size_t j = 0; j < 2; ++j) {
            const double mcse_mean = oracle::mcse_mean(fit, j);
            const double mcse_sd = oracle::mcse_sd(fit, j);
            check.require(std::fabs(fit.mean(j) - truths[j]) <= 3.0 * mcse_mean,
                          "Weibull " + fit.names[j] + " mean vs quadrature");
            check.require(std::fabs(fit.sd(j) - sds[j]) <= 3.0 * mcse_sd,
                          "Weibull " + fit.names[j] + " sd vs quadrature");
        }
    }

    // Empty data: every prior in the shipped testing and estimation tables.
    const SurvivalData empty;
    std::vector<ModelSpec> models = default_testing_models();
    const auto estimation = default_estimation_models();
    models.insert(models.end(), estimation.begin(), estimation.end());
    std::uint64_t seed = 40;
    for (const auto& model : models) {
        SamplerSettings settings;
        settings.seed = derive_seed(7000, seed++);
        const auto fit = sample_posterior(model, empty, settings);
        std::vector<PriorSpec> priors;
        if (!model.beta.is_spike()) priors.push_back(model.beta);
        priors.push_back(model.alpha);
        if (model.gamma.has_value()) priors.push_back(*model.gamma);
        for (std::size_t j = 0; j < fit.free_dim(); ++j) {
            const double mcse_mean = oracle::mcse_mean(fit, j);
            const double mcse_sd = oracle::mcse_sd(fit, j);
            check.require(std::fabs(fit.mean(j) - priors[j].mean()) <= 3.0 * mcse_mean,
                          std::string(family_name(model.family)) + " empty-data " + fit.names[j] +
                              " mean " + fmt(fit.mean(j)) + " vs prior " + fmt(priors[j].mean()));
            check.require(std::fabs(fit.sd(j) - priors[j].sd()) <= 3.0 * mcse_sd,
                          std::string(family_name(model.family)) + " empty-data " + fit.names[j] +
                              " sd " + fmt(fit.sd(j)) + " vs prior " + fmt(priors[j].sd()));
        }
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: ensemble identities.

void criterion_ensemble_identities(Check& check) {
    Rng rng(97531);
    for (int i = 0; i < 500; ++i) {
        const double prior1 = 0.05 + 0.9 * rng.uniform01();
        const std::vector<double> priors = {prior1, 1.0 - prior1};
        const std::vector<double> mls = {-80.0 + 15.0 * rng.normal(), -80.0 + 15.0 * rng.normal()};
        const auto post = posterior_model_probs(priors, mls);
        const double via_odds = (post[0] / post[1]) / (priors[0] / priors[1]);
        if (std::fabs(bayes_factor(mls[0], mls[1]) / via_odds - 1.0) > 1e-10) {
            check.require(false, "BF != posterior odds / prior odds at draw " + std::to_string(i));
            break;
        }
    }

    std::vector<double> priors(10, 0.1);
    std::vector<double> mls;
    for (int j = 0; j < 10; ++j) mls.push_back(-5150.0 + 2.1 * j);
    const auto post = posterior_model_probs(priors, mls);
    const double sum = std::accumulate(post.begin(), post.end(), 0.0);
    check.require(std::fabs(sum - 1.0) <= 1e-12, "posterior probabilities sum to " + fmt(sum));

    const std::vector<double> p2 = {0.10, 0.90};
    const std::vector<double> q2 = {0.95, 0.05};
    const std::size_t singleton[] = {0};
    const double bf = inclusion_bf(p2, q2, singleton).value;
    check.require(bf == (0.95 / 0.05) / (0.10 / 0.90),
                  "singleton inclusion BF = " + fmt(bf) + ", expected 171");
    check.require(std::fabs(bf - 171.0) < 1e-9, "singleton inclusion BF differs from 171");

    // Mixture mean linearity at 1e-12.
    auto make_fit = [](double center, std::uint64_t seed) {
        PosteriorFit fit;
        fit.names = {"beta"};
        fit.draws = Matrix(4000, 1);
        Rng r(seed);
        for (std::size_t k = 0; k < 4000; ++k) fit.draws(k, 0) = center + 0.2 * r.normal();
        return fit;
    };
    std::vector<PosteriorFit> fits;
    fits.push_back(make_fit(0.1, 5));
    fits.push_back(make_fit(0.6, 6));
    fits.push_back(make_fit(-0.2, 7));
    const std::vector<double> probs = {0.25, 0.35, 0.40};
    const auto mixture = mixture_posterior_beta(fits, probs);
    const double expected =
        0.25 * fits[0].mean(0) + 0.35 * fits[1].mean(0) + 0.40 * fits[2].mean(0);
    check.require(std::fabs(mixture.mean() - expected) <= 1e-12,
                  "mixture mean " + fmt(mixture.mean()) + " vs weighted " + fmt(expected));
}

// ---------------------------------------------------------------------------
// Criterion 5: sequential final look == fixed-n analysis, bit-identical.

void criterion_sequential_consistency(Check& check) {
    Rng rng(2468);
    SurvivalData data;
    for (int i = 0; i < 200; ++i) {
        const int arm = i % 2;
        const double t = sample_time(Family::LogNormal, 6.5 + 0.2 * arm, 1.5, rng);
        const double c = sample_time(Family::Weibull, std::log(2250.0), 1.5, rng);
        const double cut = std::min(c, 1825.0);
        data.add(std::min(t, cut), t <= cut, arm);
    }

    EnsembleConfig config;
    config.models = default_testing_models();
    config.sampler = SamplerSettings{};  // defaults: 2 chains x (1000 + 5000)

    LookSchedule schedule;
    schedule.interval_days = 1000.0;
    schedule.horizon_days = 2000.0;  // beyond the administrative cutoff
    const std::uint64_t master = 1357;
    const DecisionThresholds open{1e300, 1e300};
    const auto traj = run_sequential(data, config, schedule, open, master, 1);
    check.require(traj.look_times.size() == 2, "expected two looks");
    check.require(data.max_time() <= schedule.horizon_days, "horizon covers all times");

    const auto direct = fit_ensemble(config, data, derive_seed(master, 2), 1);
    check.require(traj.bf10.back() == direct.bf10(),
                  "final-look BF10 " + fmt(traj.bf10.back()) + " != fixed-n " +
                      fmt(direct.bf10()));
    std::array<double, 5> probs{};
    for (std::size_t m = 0; m < direct.models.size(); ++m) {
        probs[static_cast<std::size_t>(direct.models[m].family)] += direct.posterior_probs[m];
    }
    for (std::size_t f = 0; f < 5; ++f) {
        if (traj.family_probs.back()[f] != probs[f]) {
            check.require(false, "family probability mismatch at index " + std::to_string(f));
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Criteria 6 and 7: design analysis.

bool full_scale = false;

void criterion_bfda_misleading(Check& check) {
    AnalysisConfig cfg;
    cfg.models = default_testing_models();

    const int n = full_scale ? 2070 : 200;
    BfdaScenario h0;
    h0.generating = cfg.generating_models(Hypothesis::H0);
    h0.hypothesis = Hypothesis::H0;
    h0.n_participants = n;
    h0.censoring = {1.5, 2250.0, 1825.0};
    h0.replications = 100;
    h0.design = DesignKind::FixedN;
    h0.master_seed = 555000;
    BfdaScenario h1 = h0;
    h1.generating = cfg.generating_models(Hypothesis::H1);
    h1.hypothesis = Hypothesis::H1;
    h1.master_seed = 555001;

    BfdaAnalysisConfig analysis;
    analysis.analysis.models = cfg.models;
    analysis.analysis.sampler = testcfg::reduced_sampler();
    const auto fixed = run_bfda(h0, h1, analysis);
    check.require(fixed.failures_h0 == 0 && fixed.failures_h1 == 0,
                  "fixed-n replications failed: " + std::to_string(fixed.failures_h0) + "/" +
                      std::to_string(fixed.failures_h1));

    const auto bf_h0 = fixed.bf_samples(Hypothesis::H0);
    double rate_ge_10 = 0.0;
    for (double bf : bf_h0) rate_ge_10 += (bf >= 10.0) ? 1.0 : 0.0;
    rate_ge_10 /= static_cast<double>(bf_h0.size());
    check.require(rate_ge_10 < 0.05, "fraction of BF10 >= 10 under H0 is " + fmt(rate_ge_10));

    const auto fixed_cal = calibrate_fixed(bf_h0, fixed.bf_samples(Hypothesis::H1), 0.05, 0.10);

    // Sequential trajectories without early truncation; the desk scale uses
    // quarterly looks and fewer replications.
    BfdaScenario h0s = h0;
    BfdaScenario h1s = h1;
    h0s.design = h1s.design = DesignKind::Sequential;
    h0s.schedule = h1s.schedule = {full_scale ? 30.0 : 90.0, 1825.0};
    h0s.replications = h1s.replications = full_scale ? 100 : 50;
    h0s.master_seed = 556000;
    h1s.master_seed = 556001;
    const auto seq = run_bfda(h0s, h1s, analysis);
    std::vector<EvidenceTrajectory> t0, t1;
    for (const auto& r : seq.h0) t0.push_back(r.trajectory);
    for (const auto& r : seq.h1) t1.push_back(r.trajectory);
    const auto seq_cal = calibrate_sequential(t0, t1, 0.05, 0.10, 1000.0);

    check.require(seq_cal.bf10_threshold > fixed_cal.bf10_threshold,
                  "sequential BF10 threshold " + fmt(seq_cal.bf10_threshold) +
                      " does not exceed fixed-n " + fmt(fixed_cal.bf10_threshold));
    check.require(seq_cal.bf01_threshold > fixed_cal.bf01_threshold,
                  "sequential BF01 threshold " + fmt(seq_cal.bf01_threshold) +
                      " does not exceed fixed-n " + fmt(fixed_cal.bf01_threshold));
}

void criterion_sequential_power(Check& check) {
    // Weibull-generated trials with log(AF) = 0.4 at fixed supporting values
    // on the historical-prior scale; the analysis ensemble leaves the
    // generating family out. Reduced sampler settings keep the runtime down.
    ModelSpec gen;
    gen.family = Family::Weibull;
    gen.beta = PriorSpec::spike(0.4);
    gen.alpha = PriorSpec::spike(8.3);
    gen.gamma = PriorSpec::spike(1.1);
    gen.weight = 1.0;
    BfdaScenario scenario;
    scenario.generating = {gen};
    scenario.hypothesis = Hypothesis::H1;
    scenario.n_participants = 2070;
    scenario.censoring = {1.5, 2250.0, 1825.0};
    scenario.replications = 20;
    scenario.master_seed = 20240810;

    EnsembleConfig analysis;
    analysis.sampler = testcfg::reduced_sampler();
    for (const auto& m : default_testing_models()) {
        if (m.family != Family::Weibull) analysis.models.push_back(m);
    }
    for (auto& m : analysis.models) m.weight = 1.0 / 8.0;

    const LookSchedule schedule{30.0, 1825.0};
    const DecisionThresholds thresholds{6.9, 4.4};
    int accept_h1 = 0;
    int decided = 0;
    double total_time = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto data = simulate_trial(scenario, rep);
        const auto seed = derive_seed(scenario.master_seed ^ 0xA5, rep);
        const auto traj = run_sequential(data, analysis, schedule, thresholds, seed, 1);
        if (traj.decision == Decision::AcceptH1) ++accept_h1;
        if (traj.decision_time.has_value()) {
            ++decided;
            total_time += *traj.decision_time;
        }
    }
    check.require(accept_h1 >= 18,
                  "only " + std::to_string(accept_h1) + "/20 replications stopped for H1");
    const double mean_days = decided > 0 ? total_time / decided : 1e300;
    check.require(mean_days < 15.0 * 30.0, "mean decision time " + fmt(mean_days / 30.0) +
                                               " months, bound 15");
}

// ---------------------------------------------------------------------------
// Criterion 8: estimator metric machinery versus brute force.

void criterion_estimator_metrics(Check& check) {
    Rng rng(8642);
    const int n = 20;
    std::vector<double> truths(n), est(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        truths[i] = 0.4 * rng.normal();
        est[i] = truths[i] + 0.25 * rng.normal();
        lo[i] = est[i] - 0.4;
        hi[i] = est[i] + 0.4;
    }
    const auto m = estimator_metrics(est, truths, lo, hi);

    // Brute force, same summation order.
    std::vector<double> errors(n);
    for (int i = 0; i < n; ++i) errors[i] = est[i] - truths[i];
    double bias = 0.0;
    for (double e : errors) bias += e;
    bias /= n;
    double mse = 0.0;
    for (double e : errors) mse += e * e;
    mse /= n;
    double covered = 0.0;
    for (int i = 0; i < n; ++i) covered += (lo[i] <= truths[i] && truths[i] <= hi[i]) ? 1.0 : 0.0;
    std::vector<double> loo(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) acc += errors[j] * errors[j];
        }
        loo[i] = std::sqrt(acc / (n - 1));
    }
    double loo_mean = 0.0;
    for (double v : loo) loo_mean += v;
    loo_mean /= n;
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    const double jack = std::sqrt(ss * (n - 1.0) / n);

    check.require(m.bias == bias, "bias mismatch");
    check.require(m.rmse == std::sqrt(mse), "rmse mismatch");
    check.require(m.coverage == covered / n, "coverage mismatch");
    check.require(m.rmse_se == jack, "jackknife SE mismatch");
}

// ---------------------------------------------------------------------------
// Criterion 9: meta-analytic predictive prior pipeline.

void criterion_map_priors(Check& check) {
    MetaAnalysisOptions fixed_tau;
    fixed_tau.fix_tau_to_zero = true;
    SamplerSettings settings;
    settings.seed = 31415;

    const std::vector<StudyEstimate> estimates = {{8.1, 0.12}, {8.9, 0.35}, {8.45, 0.2}};
    double wsum = 0.0, target = 0.0;
    for (const auto& e : estimates) {
        const double w = 1.0 / (e.standard_error * e.standard_error);
        wsum += w;
        target += w * e.estimate;
    }
    target /= wsum;
    const auto diag = meta_analyze(estimates, settings, PredictiveScale::Intercept, fixed_tau);
    const double mcse = diag.pooled_se / std::sqrt(2000.0);
    check.require(std::fabs(diag.pooled_mean - target) <= 3.0 * mcse + 1e-3,
                  "tau=0 pooled mean " + fmt(diag.pooled_mean) + " vs inverse-variance " +
                      fmt(target));

    settings.seed = 31416;
    const auto random_effects = meta_analyze(estimates, settings, PredictiveScale::Intercept);
    const double expected_sd = std::sqrt(random_effects.pooled_se * random_effects.pooled_se +
                                         random_effects.tau * random_effects.tau);
    check.require(random_effects.predictive.param2() == expected_sd,
                  "predictive sd identity violated");
    check.require(random_effects.predictive.kind() == PriorKind::Normal,
                  "intercept predictive prior is not normal");

    settings.seed = 31417;
    const std::vector<StudyEstimate> log_scale = {{-0.05, 0.04}, {0.08, 0.05}, {0.02, 0.05}};
    const auto shape_prior = meta_analyze(log_scale, settings, PredictiveScale::LogShape);
    check.require(shape_prior.predictive.kind() == PriorKind::LogNormal,
                  "shape predictive prior is not lognormal");
    check.require(shape_prior.predictive.param2() ==
                      std::sqrt(shape_prior.pooled_se * shape_prior.pooled_se +
                                shape_prior.tau * shape_prior.tau),
                  "log-scale predictive sd identity violated");
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-reproducibility of every subcommand.

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void criterion_determinism(Check& check) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "survbma_acceptance";
    fs::create_directories(dir);
    const auto path = [&](const std::string& name) { return (dir / name).string(); };

    {
        std::ofstream cfg(path("config.json"));
        cfg << R"({
  "mode": "testing",
  "seed": 17,
  "sampler": {"chains": 2, "burnin": 150, "samples": 1500},
  "thresholds": {"bf10_upper": 6.9, "bf01_upper": 4.4},
  "schedule": {"interval_days": 120, "horizon_days": 600},
  "bfda": {"n_participants": 60, "replications": 4, "design": "fixed",
           "censoring": {"shape": 1.5, "scale": 800.0, "cutoff_days": 600.0},
           "alpha": 0.05, "beta": 0.10},
  "simulate": {"n_participants": 50, "hypothesis": "h1", "replication": 1,
               "censoring": {"shape": 1.5, "scale": 800.0, "cutoff_days": 600.0}},
  "map_prior": {"historical_data": [")"
            << path("hist0.csv") << R"(", ")" << path("hist1.csv") << R"("],
                "families": ["exponential", "weibull"]},
  "models": [
    {"family":"exponential","beta":{"kind":"spike","value":0},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},"weight":0.25},
    {"family":"weibull","beta":{"kind":"spike","value":0},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},
     "gamma":{"kind":"lognormal","mu_log":0,"sigma_log":0.3},"weight":0.25},
    {"family":"exponential","beta":{"kind":"normal","mu":0.3,"sigma":0.15,"lower":0},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},"weight":0.25},
    {"family":"weibull","beta":{"kind":"normal","mu":0.3,"sigma":0.15,"lower":0},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},
     "gamma":{"kind":"lognormal","mu_log":0,"sigma_log":0.3},"weight":0.25}
  ]
})";
    }
    {
        std::ofstream cfg(path("config_est.json"));
        cfg << R"({
  "mode": "estimation",
  "seed": 17,
  "sampler": {"chains": 2, "burnin": 150, "samples": 1500},
  "curve_grid": {"from_days": 30, "to_days": 500, "points": 10},
  "models": [
    {"family":"exponential","beta":{"kind":"normal","mu":0,"sigma":1},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},"weight":0.5},
    {"family":"weibull","beta":{"kind":"normal","mu":0,"sigma":1},
     "alpha":{"kind":"normal","mu":5.5,"sigma":2.0},
     "gamma":{"kind":"lognormal","mu_log":0,"sigma_log":0.3},"weight":0.5}
  ]
})";
    }
    {
        Rng rng(99);
        SurvivalData data;
        for (int i = 0; i < 60; ++i) {
            const double t = sample_time(Family::Exponential, 5.5, {}, rng);
            const double c = 30.0 + 500.0 * rng.uniform01();
            data.add(std::min(t, c), t <= c, i % 2);
        }
        write_csv(data, path("data.csv"));
        for (int k = 0; k < 2; ++k) {
            SurvivalData hist;
            for (int i = 0; i < 120; ++i) {
                hist.add(sample_time(Family::Exponential, 5.0, {}, rng), true, 0);
            }
            write_csv(hist, path("hist" + std::to_string(k) + ".csv"));
        }
    }

    struct Run {
        std::string name;
        std::vector<std::string> args;
        std::vector<std::string> outputs;
    };
    const std::vector<Run> runs = {
        {"fit",
         {"fit", "--config", path("config.json"), "--data", path("data.csv"), "--out",
          path("fit.json")},
         {path("fit.json")}},
        {"estimate",
         {"estimate", "--config", path("config_est.json"), "--data", path("data.csv"), "--out",
          path("est.json"), "--curves", path("est_curves.csv")},
         {path("est.json"), path("est_curves.csv")}},
        {"test",
         {"test", "--config", path("config.json"), "--data", path("data.csv"), "--out",
          path("test.json")},
         {path("test.json")}},
        {"sequential",
         {"sequential", "--config", path("config.json"), "--data", path("data.csv"), "--out",
          path("seq.json"), "--trajectory", path("seq.csv")},
         {path("seq.json"), path("seq.csv")}},
        {"bfda",
         {"bfda", "--config", path("config.json"), "--out", path("bfda.json"), "--log",
          path("bfda.ndjson")},
         {path("bfda.json"), path("bfda.ndjson")}},
        {"map-prior",
         {"map-prior", "--config", path("config.json"), "--out", path("map.json")},
         {path("map.json")}},
        {"simulate",
         {"simulate", "--config", path("config.json"), "--out", path("sim.csv")},
         {path("sim.csv")}},
    };

    for (const auto& run : runs) {
        std::vector<std::string> first;
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<std::string> args = run.args;
            args.push_back("--threads");
            args.push_back("1");
            std::ostringstream out, err;
            const int code = survbma::cli::run_cli(args, out, err);
            if (code != 0) {
                check.require(false,
                              run.name + " exited " + std::to_string(code) + ": " + err.str());
                return;
            }
            if (pass == 0) {
                for (const auto& o : run.outputs) first.push_back(slurp(o));
            } else {
                for (std::size_t i = 0; i < run.outputs.size(); ++i) {
                    if (slurp(run.outputs[i]) != first[i]) {
                        check.require(false, run.name + " output " + run.outputs[i] +
                                                 " differs between reruns");
                    }
                }
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) full_scale = true;
    }
    std::printf("acceptance suite (%s scale)\n", full_scale ? "full trial" : "desk");

    criterion(1, "binomial Bayes factor worked example", criterion_binomial);
    criterion(2, "bridge sampling matches adaptive quadrature", criterion_bridge_oracle);
    criterion(3, "sampler moments match quadrature and priors", criterion_sampler_oracle);
    criterion(4, "ensemble identities", criterion_ensemble_identities);
    criterion(5, "sequential final look reproduces fixed-n bit-identically",
              criterion_sequential_consistency);
    criterion(6, "BFDA misleading-evidence rate and threshold ordering",
              criterion_bfda_misleading);
    criterion(7, "sequential power and decision time under a Weibull effect",
              criterion_sequential_power);
    criterion(8, "estimator metrics match brute-force recomputation", criterion_estimator_metrics);
    criterion(9, "meta-analytic predictive prior pipeline", criterion_map_priors);
    criterion(10, "byte-reproducible subcommands", criterion_determinism);

    if (failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", failures);
    }
    return failures;
}
