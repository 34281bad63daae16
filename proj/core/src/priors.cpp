#include "survbma/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/special.hpp"

namespace survbma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kLogPi = 1.1447298858494002;

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ConfigError(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

PriorSpec PriorSpec::normal(double mu, double sigma) {
    require_positive(sigma, "normal sigma");
    PriorSpec s;
    s.kind_ = PriorKind::Normal;
    s.a_ = mu;
    s.b_ = sigma;
    s.lower_ = -kInf;
    s.upper_ = kInf;
    return s;
}

PriorSpec PriorSpec::truncated_normal(double mu, double sigma, double lower, double upper) {
    require_positive(sigma, "normal sigma");
    if (!(lower < upper)) throw ConfigError("truncation requires lower < upper");
    PriorSpec s;
    s.kind_ = PriorKind::TruncatedNormal;
    s.a_ = mu;
    s.b_ = sigma;
    s.lower_ = lower;
    s.upper_ = upper;
    return s;
}

PriorSpec PriorSpec::log_normal(double mu_log, double sigma_log) {
    require_positive(sigma_log, "lognormal sigma");
    PriorSpec s;
    s.kind_ = PriorKind::LogNormal;
    s.a_ = mu_log;
    s.b_ = sigma_log;
    s.lower_ = 0.0;
    s.upper_ = kInf;
    return s;
}

PriorSpec PriorSpec::cauchy(double location, double scale) {
    require_positive(scale, "cauchy scale");
    PriorSpec s;
    s.kind_ = PriorKind::Cauchy;
    s.a_ = location;
    s.b_ = scale;
    s.lower_ = -kInf;
    s.upper_ = kInf;
    return s;
}

PriorSpec PriorSpec::half_cauchy(double scale) {
    require_positive(scale, "cauchy scale");
    PriorSpec s;
    s.kind_ = PriorKind::HalfCauchy;
    s.a_ = 0.0;
    s.b_ = scale;
    s.lower_ = 0.0;
    s.upper_ = kInf;
    return s;
}

PriorSpec PriorSpec::spike(double value) {
    if (!std::isfinite(value)) throw ConfigError("spike value must be finite");
    PriorSpec s;
    s.kind_ = PriorKind::Spike;
    s.a_ = value;
    s.lower_ = value;
    s.upper_ = value;
    return s;
}

double PriorSpec::spike_value() const {
    if (!is_spike()) throw std::logic_error("spike_value on a non-spike prior");
    return a_;
}

double PriorSpec::log_density(double x) const {
    switch (kind_) {
        case PriorKind::Normal: {
            const double z = (x - a_) / b_;
            return special::normal_logpdf(z) - std::log(b_);
        }
        case PriorKind::TruncatedNormal: {
            if (x < lower_ || x > upper_) return -kInf;
            const double z = (x - a_) / b_;
            const double za = (lower_ == -kInf) ? -kInf : (lower_ - a_) / b_;
            const double zb = (upper_ == kInf) ? kInf : (upper_ - a_) / b_;
            return special::normal_logpdf(z) - std::log(b_) - special::normal_logmass(za, zb);
        }
        case PriorKind::LogNormal: {
            if (!(x > 0.0)) return -kInf;
            const double lx = std::log(x);
            const double z = (lx - a_) / b_;
            return special::normal_logpdf(z) - std::log(b_) - lx;
        }
        case PriorKind::Cauchy: {
            const double z = (x - a_) / b_;
            return -kLogPi - std::log(b_) - std::log1p(z * z);
        }
        case PriorKind::HalfCauchy: {
            if (!(x >= 0.0)) return -kInf;
            const double z = x / b_;
            return std::numbers::ln2 - kLogPi - std::log(b_) - std::log1p(z * z);
        }
        case PriorKind::Spike:
            throw std::logic_error("spike priors are substituted, never evaluated");
    }
    return -kInf;  // unreachable
}

double PriorSpec::cdf(double x) const {
    switch (kind_) {
        case PriorKind::Normal:
            return special::normal_cdf((x - a_) / b_);
        case PriorKind::TruncatedNormal: {
            if (x <= lower_) return 0.0;
            if (x >= upper_) return 1.0;
            const double za = (lower_ == -kInf) ? -kInf : (lower_ - a_) / b_;
            const double zb = (upper_ == kInf) ? kInf : (upper_ - a_) / b_;
            const double fa = (za == -kInf) ? 0.0 : special::normal_cdf(za);
            const double fb = (zb == kInf) ? 1.0 : special::normal_cdf(zb);
            return (special::normal_cdf((x - a_) / b_) - fa) / (fb - fa);
        }
        case PriorKind::LogNormal:
            if (!(x > 0.0)) return 0.0;
            return special::normal_cdf((std::log(x) - a_) / b_);
        case PriorKind::Cauchy:
            return 0.5 + std::atan((x - a_) / b_) / std::numbers::pi;
        case PriorKind::HalfCauchy:
            if (!(x > 0.0)) return 0.0;
            return 2.0 * std::atan(x / b_) / std::numbers::pi;
        case PriorKind::Spike:
            return x >= a_ ? 1.0 : 0.0;
    }
    return 0.0;  // unreachable
}

double PriorSpec::sample(Rng& rng) const {
    switch (kind_) {
        case PriorKind::Normal:
            return a_ + b_ * rng.normal();
        case PriorKind::TruncatedNormal: {
            const double za = (lower_ == -kInf) ? -kInf : (lower_ - a_) / b_;
            const double zb = (upper_ == kInf) ? kInf : (upper_ - a_) / b_;
            const double fa = (za == -kInf) ? 0.0 : special::normal_cdf(za);
            const double fb = (zb == kInf) ? 1.0 : special::normal_cdf(zb);
            const double p = fa + rng.uniform01() * (fb - fa);
            const double x = a_ + b_ * special::normal_quantile(p);
            return std::min(std::max(x, lower_), upper_);
        }
        case PriorKind::LogNormal:
            return std::exp(a_ + b_ * rng.normal());
        case PriorKind::Cauchy:
            return rng.cauchy(a_, b_);
        case PriorKind::HalfCauchy:
            return rng.half_cauchy(b_);
        case PriorKind::Spike:
            return a_;
    }
    return 0.0;  // unreachable
}

double PriorSpec::mean() const {
    switch (kind_) {
        case PriorKind::Normal:
            return a_;
        case PriorKind::TruncatedNormal: {
            const double za = (lower_ == -kInf) ? -kInf : (lower_ - a_) / b_;
            const double zb = (upper_ == kInf) ? kInf : (upper_ - a_) / b_;
            const double pa = (za == -kInf) ? 0.0 : special::normal_pdf(za);
            const double pb = (zb == kInf) ? 0.0 : special::normal_pdf(zb);
            const double mass = std::exp(special::normal_logmass(za, zb));
            return a_ + b_ * (pa - pb) / mass;
        }
        case PriorKind::LogNormal:
            return std::exp(a_ + 0.5 * b_ * b_);
        case PriorKind::Cauchy:
        case PriorKind::HalfCauchy:
            return kNan;
        case PriorKind::Spike:
            return a_;
    }
    return kNan;  // unreachable
}

double PriorSpec::sd() const {
    switch (kind_) {
        case PriorKind::Normal:
            return b_;
        case PriorKind::TruncatedNormal: {
            const double za = (lower_ == -kInf) ? -kInf : (lower_ - a_) / b_;
            const double zb = (upper_ == kInf) ? kInf : (upper_ - a_) / b_;
            const double pa = (za == -kInf) ? 0.0 : special::normal_pdf(za);
            const double pb = (zb == kInf) ? 0.0 : special::normal_pdf(zb);
            const double mass = std::exp(special::normal_logmass(za, zb));
            const double apa = (za == -kInf) ? 0.0 : za * pa;
            const double bpb = (zb == kInf) ? 0.0 : zb * pb;
            const double ratio = (pa - pb) / mass;
            const double var = 1.0 + (apa - bpb) / mass - ratio * ratio;
            return b_ * std::sqrt(var);
        }
        case PriorKind::LogNormal: {
            const double m = std::exp(a_ + 0.5 * b_ * b_);
            return m * std::sqrt(std::expm1(b_ * b_));
        }
        case PriorKind::Cauchy:
        case PriorKind::HalfCauchy:
            return kNan;
        case PriorKind::Spike:
            return 0.0;
    }
    return kNan;  // unreachable
}

double PriorSpec::clamp_center() const {
    switch (kind_) {
        case PriorKind::Normal:
        case PriorKind::Cauchy:
        case PriorKind::Spike:
            return a_;
        case PriorKind::TruncatedNormal:
            return mean();
        case PriorKind::LogNormal:
            return std::exp(a_);  // median
        case PriorKind::HalfCauchy:
            return b_;
    }
    return 0.0;  // unreachable
}

double PriorSpec::clamp_spread() const {
    switch (kind_) {
        case PriorKind::Normal:
        case PriorKind::Cauchy:
            return b_;
        case PriorKind::TruncatedNormal:
            return sd();
        case PriorKind::LogNormal:
            return std::exp(a_) * b_;  // median times log-sd
        case PriorKind::HalfCauchy:
            return b_;
        case PriorKind::Spike:
            return 0.0;
    }
    return 0.0;  // unreachable
}

double PriorSpec::support_lower() const { return lower_; }
double PriorSpec::support_upper() const { return upper_; }

void ModelSpec::validate() const {
    if (family_has_shape(family) != gamma.has_value()) {
        throw ConfigError(std::string("model ") + std::string(family_name(family)) +
                          (gamma.has_value() ? ": unexpected shape prior"
                                             : ": missing shape prior"));
    }
    if (gamma.has_value() && !gamma->is_spike() && gamma->support_lower() < 0.0) {
        throw ConfigError("shape prior must have nonnegative support");
    }
    if (gamma.has_value() && gamma->is_spike() && !(gamma->spike_value() > 0.0)) {
        throw ConfigError("shape spike must be positive");
    }
    if (!(weight > 0.0 && weight <= 1.0)) {
        throw ConfigError("prior model weight must lie in (0, 1]");
    }
}

void validate_ensemble(const std::vector<ModelSpec>& models) {
    if (models.empty()) throw ConfigError("ensemble must contain at least one model");
    double total = 0.0;
    for (const auto& m : models) {
        m.validate();
        total += m.weight;
    }
    if (std::fabs(total - 1.0) > 1e-6) {
        throw ConfigError("prior model weights must sum to 1");
    }
}

}  // namespace survbma
