#include "survbma/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "survbma/errors.hpp"

namespace survbma {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback,
                     const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_number_integer()) {
        throw ConfigError("key '" + key + "' in " + where + " must be an integer");
    }
    return obj[key].get<int>();
}

bool get_bool_or(const json& obj, const std::string& key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ConfigError("key '" + key + "' in " + where + " must be a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    if (!obj[key].is_string()) throw ConfigError("key '" + key + "' in " + where + " must be a string");
    return obj[key].get<std::string>();
}

PriorSpec parse_prior_json(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("prior in " + where + " must be an object");
    const std::string kind = get_string(obj, "kind", where);
    if (kind == "normal") {
        reject_unknown_keys(obj, {"kind", "mu", "sigma", "lower", "upper"}, where);
        const double mu = get_number(obj, "mu", where);
        const double sigma = get_number(obj, "sigma", where);
        const bool truncated = obj.contains("lower") || obj.contains("upper");
        if (!truncated) return PriorSpec::normal(mu, sigma);
        const double lower = get_number_or(obj, "lower", -kInf, where);
        const double upper = get_number_or(obj, "upper", kInf, where);
        return PriorSpec::truncated_normal(mu, sigma, lower, upper);
    }
    if (kind == "lognormal") {
        reject_unknown_keys(obj, {"kind", "mu_log", "sigma_log"}, where);
        return PriorSpec::log_normal(get_number(obj, "mu_log", where),
                                     get_number(obj, "sigma_log", where));
    }
    if (kind == "cauchy") {
        reject_unknown_keys(obj, {"kind", "location", "scale"}, where);
        return PriorSpec::cauchy(get_number(obj, "location", where),
                                 get_number(obj, "scale", where));
    }
    if (kind == "halfcauchy") {
        reject_unknown_keys(obj, {"kind", "scale"}, where);
        return PriorSpec::half_cauchy(get_number(obj, "scale", where));
    }
    if (kind == "spike") {
        reject_unknown_keys(obj, {"kind", "value"}, where);
        return PriorSpec::spike(get_number(obj, "value", where));
    }
    throw ConfigError("unknown prior kind '" + kind + "' in " + where);
}

CensoringSpec parse_censoring(const json& obj, const std::string& where) {
    reject_unknown_keys(obj, {"shape", "scale", "cutoff_days"}, where);
    CensoringSpec c;
    c.shape = get_number(obj, "shape", where);
    if (obj.contains("scale") && obj["scale"].is_string()) {
        if (obj["scale"].get<std::string>() != "none") {
            throw ConfigError("censoring scale must be a number or \"none\" in " + where);
        }
        c.scale = kInf;
    } else {
        c.scale = get_number(obj, "scale", where);
    }
    c.cutoff_days = get_number(obj, "cutoff_days", where);
    c.validate();
    return c;
}

ModelSpec parse_model(const json& obj, std::size_t index) {
    const std::string where = "models[" + std::to_string(index) + "]";
    reject_unknown_keys(obj, {"family", "beta", "alpha", "gamma", "weight"}, where);
    ModelSpec model;
    model.family = family_from_name(get_string(obj, "family", where));
    if (!obj.contains("beta") || !obj.contains("alpha")) {
        throw ConfigError(where + " requires 'beta' and 'alpha' priors");
    }
    model.beta = parse_prior_json(obj["beta"], where + ".beta");
    model.alpha = parse_prior_json(obj["alpha"], where + ".alpha");
    if (obj.contains("gamma")) {
        model.gamma = parse_prior_json(obj["gamma"], where + ".gamma");
    }
    model.weight = get_number(obj, "weight", where);
    model.validate();
    return model;
}

std::vector<Family> parse_families(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) throw ConfigError(where + " must be a nonempty array");
    std::vector<Family> families;
    for (const auto& item : arr) {
        if (!item.is_string()) throw ConfigError(where + " entries must be strings");
        families.push_back(family_from_name(item.get<std::string>()));
    }
    return families;
}

AnalysisConfig parse_config_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root,
                        {"mode", "models", "sampler", "seed", "thresholds", "schedule", "bfda",
                         "simulate", "map_prior", "families", "curve_grid"},
                        "config");

    AnalysisConfig cfg;
    if (root.contains("mode")) {
        const std::string mode = root["mode"].get<std::string>();
        if (mode == "estimation") cfg.mode = EnsembleMode::Estimation;
        else if (mode == "testing") cfg.mode = EnsembleMode::Testing;
        else throw ConfigError("mode must be 'estimation' or 'testing'");
    }

    if (root.contains("models")) {
        if (!root["models"].is_array() || root["models"].empty()) {
            throw ConfigError("'models' must be a nonempty array");
        }
        for (std::size_t i = 0; i < root["models"].size(); ++i) {
            cfg.models.push_back(parse_model(root["models"][i], i));
        }
        validate_ensemble(cfg.models);
        if (cfg.mode.has_value()) validate_mode_models(*cfg.mode, cfg.models);
    }

    if (root.contains("sampler")) {
        const auto& s = root["sampler"];
        reject_unknown_keys(s, {"chains", "burnin", "samples", "target_acceptance"}, "sampler");
        if (s.contains("chains")) cfg.sampler.chains = get_int(s, "chains", "sampler");
        if (s.contains("burnin")) cfg.sampler.burnin = get_int(s, "burnin", "sampler");
        if (s.contains("samples")) cfg.sampler.samples = get_int(s, "samples", "sampler");
        cfg.sampler.target_acceptance =
            get_number_or(s, "target_acceptance", cfg.sampler.target_acceptance, "sampler");
        cfg.sampler.validate();
    }

    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer() || root["seed"].get<std::int64_t>() < 0) {
            throw ConfigError("seed must be a nonnegative integer");
        }
        cfg.seed = root["seed"].get<std::uint64_t>();
    }

    if (root.contains("thresholds")) {
        const auto& t = root["thresholds"];
        reject_unknown_keys(t, {"bf10_upper", "bf01_upper"}, "thresholds");
        DecisionThresholds thr;
        thr.bf10_upper = get_number(t, "bf10_upper", "thresholds");
        thr.bf01_upper = get_number(t, "bf01_upper", "thresholds");
        thr.validate();
        cfg.thresholds = thr;
    }

    if (root.contains("schedule")) {
        const auto& s = root["schedule"];
        reject_unknown_keys(s, {"interval_days", "horizon_days"}, "schedule");
        LookSchedule schedule;
        schedule.interval_days = get_number_or(s, "interval_days", 30.0, "schedule");
        schedule.horizon_days = get_number(s, "horizon_days", "schedule");
        schedule.validate();
        cfg.schedule = schedule;
    }

    if (root.contains("bfda")) {
        const auto& b = root["bfda"];
        reject_unknown_keys(b,
                            {"n_participants", "replications", "design", "censoring", "alpha",
                             "beta", "leave_one_family_out", "truncate_bf"},
                            "bfda");
        BfdaSection section;
        section.n_participants = get_int(b, "n_participants", "bfda");
        section.replications = get_int(b, "replications", "bfda");
        const std::string design = get_string(b, "design", "bfda");
        if (design == "fixed") section.design = DesignKind::FixedN;
        else if (design == "sequential") section.design = DesignKind::Sequential;
        else throw ConfigError("bfda design must be 'fixed' or 'sequential'");
        if (!b.contains("censoring")) throw ConfigError("bfda requires a 'censoring' object");
        section.censoring = parse_censoring(b["censoring"], "bfda.censoring");
        section.alpha = get_number_or(b, "alpha", section.alpha, "bfda");
        section.beta = get_number_or(b, "beta", section.beta, "bfda");
        if (!(section.alpha > 0.0 && section.alpha < 1.0) ||
            !(section.beta > 0.0 && section.beta < 1.0)) {
            throw ConfigError("bfda alpha/beta must lie in (0, 1)");
        }
        section.leave_one_family_out =
            get_bool_or(b, "leave_one_family_out", false, "bfda");
        section.truncate_bf = get_bool_or(b, "truncate_bf", true, "bfda");
        cfg.bfda = section;
    }

    if (root.contains("simulate")) {
        const auto& s = root["simulate"];
        reject_unknown_keys(s, {"n_participants", "hypothesis", "replication", "censoring"},
                            "simulate");
        SimulateSection section;
        section.n_participants = get_int(s, "n_participants", "simulate");
        const std::string hyp = get_string(s, "hypothesis", "simulate");
        if (hyp == "h0") section.hypothesis = Hypothesis::H0;
        else if (hyp == "h1") section.hypothesis = Hypothesis::H1;
        else throw ConfigError("simulate hypothesis must be 'h0' or 'h1'");
        section.replication = s.contains("replication") ? get_int(s, "replication", "simulate") : 0;
        if (!s.contains("censoring")) throw ConfigError("simulate requires a 'censoring' object");
        section.censoring = parse_censoring(s["censoring"], "simulate.censoring");
        cfg.simulate = section;
    }

    if (root.contains("map_prior")) {
        const auto& m = root["map_prior"];
        reject_unknown_keys(m, {"historical_data", "families", "tau_fixed_zero"}, "map_prior");
        MapPriorSection section;
        if (!m.contains("historical_data") || !m["historical_data"].is_array() ||
            m["historical_data"].empty()) {
            throw ConfigError("map_prior requires a nonempty 'historical_data' array");
        }
        for (const auto& p : m["historical_data"]) {
            if (!p.is_string()) throw ConfigError("map_prior.historical_data entries must be paths");
            section.historical_data.push_back(p.get<std::string>());
        }
        if (m.contains("families")) {
            section.families = parse_families(m["families"], "map_prior.families");
        }
        section.tau_fixed_zero = get_bool_or(m, "tau_fixed_zero", false, "map_prior");
        cfg.map_prior = section;
    }

    if (root.contains("families")) {
        cfg.families = parse_families(root["families"], "families");
    }

    if (root.contains("curve_grid")) {
        const auto& c = root["curve_grid"];
        reject_unknown_keys(c, {"from_days", "to_days", "points"}, "curve_grid");
        CurveGridSection grid;
        grid.from_days = get_number(c, "from_days", "curve_grid");
        grid.to_days = get_number(c, "to_days", "curve_grid");
        grid.points = get_int(c, "points", "curve_grid");
        if (!(grid.from_days > 0.0) || !(grid.to_days > grid.from_days) || grid.points < 2) {
            throw ConfigError("curve_grid requires 0 < from_days < to_days and points >= 2");
        }
        cfg.curve_grid = grid;
    }

    return cfg;
}

}  // namespace

EnsembleConfig AnalysisConfig::ensemble() const {
    if (models.empty()) throw ConfigError("config has no 'models' section");
    EnsembleConfig c;
    c.models = models;
    c.sampler = sampler;
    return c;
}

std::vector<ModelSpec> AnalysisConfig::generating_models(Hypothesis hypothesis) const {
    std::vector<ModelSpec> out;
    double total = 0.0;
    for (const auto& m : models) {
        if (m.has_free_beta() == (hypothesis == Hypothesis::H1)) {
            out.push_back(m);
            total += m.weight;
        }
    }
    if (out.empty()) {
        throw ConfigError(hypothesis == Hypothesis::H1
                              ? "config has no models assuming the effect"
                              : "config has no null models");
    }
    for (auto& m : out) m.weight /= total;
    return out;
}

AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

AnalysisConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(root);
}

PriorSpec parse_prior(const std::string& json_text) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("prior is not valid JSON: ") + e.what());
    }
    return parse_prior_json(obj, "prior");
}

void validate_mode_models(EnsembleMode mode, const std::vector<ModelSpec>& models) {
    if (mode == EnsembleMode::Estimation) {
        for (const auto& m : models) {
            if (!m.has_free_beta()) {
                throw ConfigError("estimation ensembles must not contain spike-beta models");
            }
        }
        return;
    }
    for (Family f : kAllFamilies) {
        bool any = false, spike = false, free = false;
        for (const auto& m : models) {
            if (m.family != f) continue;
            any = true;
            (m.has_free_beta() ? free : spike) = true;
        }
        if (any && !(spike && free)) {
            throw ConfigError(std::string("testing ensemble: family ") +
                              std::string(family_name(f)) +
                              " needs both a spike-beta and a free-beta model");
        }
    }
}

namespace {

struct FamilyPriors {
    Family family;
    PriorSpec alpha;
    std::optional<PriorSpec> gamma;
};

// Intercept and shape priors estimated from the three historical studies.
std::vector<FamilyPriors> historical_priors() {
    return {
        {Family::Exponential, PriorSpec::normal(8.70, 2.04), {}},
        {Family::Weibull, PriorSpec::normal(8.80, 2.20), PriorSpec::log_normal(-0.07, 0.22)},
        {Family::LogNormal, PriorSpec::normal(8.70, 1.95), PriorSpec::log_normal(0.62, 0.25)},
        {Family::LogLogistic, PriorSpec::normal(8.54, 2.37), PriorSpec::log_normal(0.02, 0.27)},
        {Family::Gamma, PriorSpec::normal(8.88, 2.05), PriorSpec::log_normal(-0.10, 0.39)},
    };
}

}  // namespace

std::vector<ModelSpec> default_estimation_models() {
    std::vector<ModelSpec> models;
    for (const auto& fp : historical_priors()) {
        ModelSpec m;
        m.family = fp.family;
        m.beta = PriorSpec::normal(0.0, 1.0);
        m.alpha = fp.alpha;
        m.gamma = fp.gamma;
        m.weight = 1.0 / 5.0;
        models.push_back(m);
    }
    return models;
}

std::vector<ModelSpec> default_testing_models() {
    std::vector<ModelSpec> models;
    for (int effect = 0; effect < 2; ++effect) {
        for (const auto& fp : historical_priors()) {
            ModelSpec m;
            m.family = fp.family;
            m.beta = effect == 0 ? PriorSpec::spike(0.0)
                                 : PriorSpec::truncated_normal(0.30, 0.15, 0.0, kInf);
            m.alpha = fp.alpha;
            m.gamma = fp.gamma;
            m.weight = 1.0 / 10.0;
            models.push_back(m);
        }
    }
    return models;
}

namespace {

json prior_to_json(const PriorSpec& prior) {
    json out;
    switch (prior.kind()) {
        case PriorKind::Normal:
            out = {{"kind", "normal"}, {"mu", prior.param1()}, {"sigma", prior.param2()}};
            break;
        case PriorKind::TruncatedNormal:
            out = {{"kind", "normal"}, {"mu", prior.param1()}, {"sigma", prior.param2()}};
            if (prior.lower_bound() != -kInf) out["lower"] = prior.lower_bound();
            if (prior.upper_bound() != kInf) out["upper"] = prior.upper_bound();
            break;
        case PriorKind::LogNormal:
            out = {{"kind", "lognormal"}, {"mu_log", prior.param1()}, {"sigma_log", prior.param2()}};
            break;
        case PriorKind::Cauchy:
            out = {{"kind", "cauchy"}, {"location", prior.param1()}, {"scale", prior.param2()}};
            break;
        case PriorKind::HalfCauchy:
            out = {{"kind", "halfcauchy"}, {"scale", prior.param2()}};
            break;
        case PriorKind::Spike:
            out = {{"kind", "spike"}, {"value", prior.param1()}};
            break;
    }
    return out;
}

}  // namespace

std::string default_config_json(EnsembleMode mode) {
    json root;
    root["mode"] = (mode == EnsembleMode::Estimation) ? "estimation" : "testing";
    root["seed"] = 1;
    root["sampler"] = {{"chains", 2}, {"burnin", 1000}, {"samples", 5000},
                       {"target_acceptance", 0.44}};
    json models = json::array();
    const auto specs =
        (mode == EnsembleMode::Estimation) ? default_estimation_models() : default_testing_models();
    for (const auto& m : specs) {
        json entry;
        entry["family"] = std::string(family_name(m.family));
        entry["beta"] = prior_to_json(m.beta);
        entry["alpha"] = prior_to_json(m.alpha);
        if (m.gamma.has_value()) entry["gamma"] = prior_to_json(*m.gamma);
        entry["weight"] = m.weight;
        models.push_back(entry);
    }
    root["models"] = models;
    if (mode == EnsembleMode::Testing) {
        root["thresholds"] = {{"bf10_upper", 6.9}, {"bf01_upper", 4.4}};
        root["schedule"] = {{"interval_days", 30.0}, {"horizon_days", 1825.0}};
    }
    return root.dump(2) + "\n";
}

}  // namespace survbma
