#include "survbma/mle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>

#include "survbma/errors.hpp"
#include "survbma/rng.hpp"

namespace survbma {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

using Objective = std::function<double(std::span<const double>)>;

// Standard Nelder-Mead on the negative log-likelihood.
std::vector<double> nelder_mead(const Objective& f, std::vector<double> start, double scale,
                                int max_iter) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += scale;
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = simplex[idx[i]];
            v2[i] = values[idx[i]];
        }
        simplex.swap(s2);
        values.swap(v2);
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::fabs(values[n] - values[0]) <
            1e-12 * (std::fabs(values[0]) + std::fabs(values[n])) + 1e-14) {
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            }
            return p;
        };

        auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < values[0]) {
            auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            auto contracted = blend(fr < values[n] ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, values[n])) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return simplex[0];
}

double fd_step(double x) { return std::max(1e-5, 1e-5 * std::fabs(x)); }

std::vector<double> gradient(const Objective& f, std::span<const double> x) {
    std::vector<double> g(x.size());
    std::vector<double> p(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double h = fd_step(x[j]);
        p[j] = x[j] + h;
        const double fp = f(p);
        p[j] = x[j] - h;
        const double fm = f(p);
        p[j] = x[j];
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<std::vector<double>> hessian(const Objective& f, std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
    std::vector<double> p(x.begin(), x.end());
    const double f0 = f(p);
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = fd_step(x[i]);
        p[i] = x[i] + hi;
        const double fp = f(p);
        p[i] = x[i] - hi;
        const double fm = f(p);
        p[i] = x[i];
        h[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double hj = fd_step(x[j]);
            p[i] = x[i] + hi; p[j] = x[j] + hj;
            const double fpp = f(p);
            p[j] = x[j] - hj;
            const double fpm = f(p);
            p[i] = x[i] - hi; p[j] = x[j] + hj;
            const double fmp = f(p);
            p[j] = x[j] - hj;
            const double fmm = f(p);
            p[i] = x[i]; p[j] = x[j];
            h[i][j] = h[j][i] = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
        }
    }
    return h;
}

// Inverse of a small symmetric matrix by Gauss-Jordan; returns false when
// effectively singular.
bool invert(std::vector<std::vector<double>> a, std::vector<std::vector<double>>& inv) {
    const std::size_t n = a.size();
    inv.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (std::fabs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = a[r][col];
            if (m == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= m * a[col][j];
                inv[r][j] -= m * inv[col][j];
            }
        }
    }
    return true;
}

bool positive_diagonal(const std::vector<std::vector<double>>& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m[i][i] > 0.0) || !std::isfinite(m[i][i])) return false;
    }
    return true;
}

// Positive definiteness via Cholesky.
bool positive_definite(const std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = a[i][j];
            for (std::size_t k = 0; k < j; ++k) acc -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(acc > 0.0) || !std::isfinite(acc)) return false;
                l[i][i] = std::sqrt(acc);
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    return true;
}

// Full-Newton polish on the finite-difference Hessian. Steps below 1e-3 are
// taken on the quadratic model alone: near the optimum the objective
// improvement drops under double rounding, so an f-decrease test would stall
// while the gradient is still reducible.
void newton_polish(const Objective& f, std::vector<double>& x) {
    const std::size_t n = x.size();
    for (int iter = 0; iter < 10; ++iter) {
        const auto g = gradient(f, x);
        const auto h = hessian(f, x);
        std::vector<std::vector<double>> inv;
        if (!positive_diagonal(h) || !invert(h, inv)) return;
        std::vector<double> step(n, 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) step[i] -= inv[i][j] * g[j];
            step[i] = std::min(std::max(step[i], -1.0), 1.0);
            norm = std::max(norm, std::fabs(step[i]));
        }
        if (norm < 1e-10) return;
        std::vector<double> candidate(n);
        for (std::size_t i = 0; i < n; ++i) candidate[i] = x[i] + step[i];
        if (norm > 1e-3 && !(f(candidate) < f(x))) return;
        x = candidate;
    }
}

}  // namespace

double MleFit::wald_z() const {
    if (!includes_treatment || !(se_beta > 0.0)) return kNan;
    return estimates.beta / se_beta;
}

MleFit fit_mle(Family family, const SurvivalData& data, bool include_treatment) {
    data.validate();
    if (data.num_events() == 0) {
        throw ConfigError("maximum-likelihood fitting requires at least one observed event");
    }
    if (include_treatment && (data.num_in_arm(0) == 0 || data.num_in_arm(1) == 0)) {
        throw ConfigError("treatment coefficient requires observations in both arms");
    }

    const bool has_shape = family_has_shape(family);
    const std::size_t dim = 1 + (include_treatment ? 1 : 0) + (has_shape ? 1 : 0);
    const std::size_t beta_idx = 0;
    const std::size_t alpha_idx = include_treatment ? 1 : 0;
    const std::size_t shape_idx = alpha_idx + 1;

    const LikelihoodContext likelihood(data, family);
    const Objective negloglik = [&](std::span<const double> x) {
        ParamVector p;
        p.beta = include_treatment ? x[beta_idx] : 0.0;
        p.alpha = x[alpha_idx];
        if (has_shape) p.gamma = std::exp(x[shape_idx]);
        const double ll = likelihood(p);
        return std::isfinite(ll) ? -ll : kInf;
    };

    // Moment-flavored start: log mean time as the intercept, unit shape.
    double mean_time = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) mean_time += data.time(i);
    mean_time /= static_cast<double>(data.size());
    std::vector<double> start(dim, 0.0);
    start[alpha_idx] = std::log(mean_time);

    std::vector<double> best;
    double best_value = kInf;
    bool converged = false;
    Rng jitter_rng(0x4D4C45ULL);  // fixed stream keeps fits deterministic
    for (int attempt = 0; attempt <= 5 && !converged; ++attempt) {
        std::vector<double> x0 = start;
        if (attempt > 0) {
            for (double& v : x0) v += 0.5 * jitter_rng.normal();
        }
        std::vector<double> x = nelder_mead(negloglik, x0, 0.5, 400 * static_cast<int>(dim));
        newton_polish(negloglik, x);
        const double value = negloglik(x);
        if (value < best_value) {
            best_value = value;
            best = x;
        }
        const auto g = gradient(negloglik, best);
        double gmax = 0.0;
        for (double gj : g) gmax = std::max(gmax, std::fabs(gj));
        converged = std::isfinite(best_value) && gmax < 1e-4;
    }
    if (best.empty()) throw NumericError("maximum-likelihood optimization produced no candidate");

    MleFit fit;
    fit.family = family;
    fit.includes_treatment = include_treatment;
    fit.num_free_params = static_cast<int>(dim);
    fit.converged = converged;
    fit.estimates.beta = include_treatment ? best[beta_idx] : 0.0;
    fit.estimates.alpha = best[alpha_idx];
    if (has_shape) fit.estimates.gamma = std::exp(best[shape_idx]);
    fit.log_lik = -best_value;
    const double k = static_cast<double>(dim);
    const double n = static_cast<double>(data.size());
    fit.aic = 2.0 * k - 2.0 * fit.log_lik;
    fit.bic = k * std::log(n) - 2.0 * fit.log_lik;

    fit.se_beta = fit.se_alpha = fit.se_gamma = fit.se_log_gamma = kNan;
    const auto h = hessian(negloglik, best);
    std::vector<std::vector<double>> cov;
    if (positive_definite(h) && invert(h, cov) && positive_diagonal(cov)) {
        fit.hessian_pd = true;
        if (include_treatment) fit.se_beta = std::sqrt(cov[beta_idx][beta_idx]);
        fit.se_alpha = std::sqrt(cov[alpha_idx][alpha_idx]);
        if (has_shape) {
            fit.se_log_gamma = std::sqrt(cov[shape_idx][shape_idx]);
            fit.se_gamma = *fit.estimates.gamma * fit.se_log_gamma;  // delta method
        }
    }
    return fit;
}

std::size_t select_model(const std::vector<MleFit>& fits, SelectionCriterion criterion) {
    if (fits.empty()) throw std::invalid_argument("select_model: empty fit list");
    std::size_t best = 0;
    auto value = [&](const MleFit& f) {
        return criterion == SelectionCriterion::AIC ? f.aic : f.bic;
    };
    for (std::size_t i = 1; i < fits.size(); ++i) {
        const double vi = value(fits[i]);
        const double vb = value(fits[best]);
        if (vi < vb ||
            (vi == vb && static_cast<int>(fits[i].family) < static_cast<int>(fits[best].family))) {
            best = i;
        }
    }
    return best;
}

}  // namespace survbma
