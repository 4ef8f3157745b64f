#include "ubbs1/estimation.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ubbs1/optimizer.hpp"
#include "ubbs1/specfun.hpp"

namespace ubbs1 {

namespace {

constexpr double kRhoMargin = 1e-10;
constexpr double kSpacingFloor = 1e-300;
constexpr int kParams = 5;

double log_odds(double z) { return std::log1p(-z) - std::log(z); }

// Gradient of one log-kernel term with respect to (alpha1, alpha2, beta1, beta2, rho).
ParamVector kernel_gradient(double log_s, const Ubbs1Params& p) {
    const double a1 = p.alpha1, a2 = p.alpha2, b1 = p.beta1, b2 = p.beta2, rho = p.rho;
    const double q = 1.0 - rho * rho;

    // u = a^2 - 2 rho a b + b^2 and v = c^2 - 2 rho c d + d^2
    const double a = std::exp(0.5 * (log_s - std::log(b1))) / a1;
    const double b = 1.0 / (a2 * std::sqrt(b2));
    const double c = std::exp(0.5 * (std::log(b1) - log_s)) / a1;
    const double d = std::sqrt(b2) / a2;
    const double u = (a - rho * b) * (a - rho * b) + q * b * b;
    const double v = (c - rho * d) * (c - rho * d) + q * d * d;

    const ParamVector du{(-2.0 / a1) * (a * a - rho * a * b), (-2.0 / a2) * (b * b - rho * a * b),
                         (-1.0 / b1) * (a * a - rho * a * b), (-1.0 / b2) * (b * b - rho * a * b), -2.0 * a * b};
    const ParamVector dv{(-2.0 / a1) * (c * c - rho * c * d), (-2.0 / a2) * (d * d - rho * c * d),
                         (c * c - rho * c * d) / b1, (d * d - rho * c * d) / b2, -2.0 * c * d};

    const double x = std::sqrt(u * v) / q;
    ParamVector dlog_x = 0.5 * (du / u + dv / v);
    dlog_x(4) += 2.0 * rho / q;
    const ParamVector dx = x * dlog_x;

    const double log_r = 0.5 * (std::log(b2) + log_s - std::log(b1));
    const double r = std::exp(log_r);
    const double t0 = r + 1.0 / r;
    ParamVector dt0 = ParamVector::Zero();
    dt0(2) = (r - 1.0 / r) * (-0.5 / b1);
    dt0(3) = (r - 1.0 / r) * (0.5 / b2);

    const double log_t = 0.5 * (std::log(v) - std::log(u) + log_s - std::log(b1) - std::log(b2));
    const double t = std::exp(log_t);
    const double t1 = t + 1.0 / t;
    ParamVector dlog_t = 0.5 * (dv / v - du / u);
    dlog_t(2) -= 0.5 / b1;
    dlog_t(3) -= 0.5 / b2;
    const ParamVector dt1 = (t - 1.0 / t) * dlog_t;

    // log G with G = T0 K0(x) + T1 K1(x); K0' = -K1, K1' = -K0 - K1/x. Scaled values share e^{-x}.
    const double k0 = specfun::bessel_k_scaled(0, x);
    const double k1 = specfun::bessel_k_scaled(1, x);
    const double g = t0 * k0 + t1 * k1;
    const ParamVector dlog_g = (dt0 * k0 + dt1 * k1 - dx * (t0 * k1 + t1 * (k0 + k1 / x))) / g;

    const double a_sum = 1.0 / (a1 * a1) + 1.0 / (a2 * a2);
    const double cross = rho * t0 / (a1 * a2 * q);  // the -rho T0 / (a1 a2 Q) exponent term, sign applied below
    ParamVector out = dlog_g;
    out(0) += -2.0 / (a1 * a1 * a1 * q) - 1.0 / a1 + cross / a1;
    out(1) += -2.0 / (a2 * a2 * a2 * q) - 1.0 / a2 + cross / a2;
    out(2) += -rho / (a1 * a2 * q) * dt0(2);
    out(3) += -rho / (a1 * a2 * q) * dt0(3);
    out(4) += 2.0 * rho * a_sum / (q * q) + rho / q - (1.0 + rho * rho) * t0 / (a1 * a2 * q * q);
    return out;
}

// Reduced coordinates: (log alpha1, log alpha2, log(beta2 / beta1), atanh rho) with
// log sqrt(beta1 beta2) held at `anchor`.
struct Reduced {
    double anchor = 0.0;

    Ubbs1Params params(const Eigen::VectorXd& xi) const {
        ParamVector full;
        full << xi(0), xi(1), anchor - 0.5 * xi(2), anchor + 0.5 * xi(2), xi(3);
        return ParamTransform::backward(full);
    }

    Eigen::VectorXd coords(const Ubbs1Params& p) const {
        const ParamVector full = ParamTransform::forward(p);
        Eigen::VectorXd xi(4);
        xi << full(0), full(1), full(3) - full(2), full(4);
        return xi;
    }

    Eigen::VectorXd chain(const ParamVector& grad, const Ubbs1Params& p) const {
        Eigen::VectorXd out(4);
        out << p.alpha1 * grad(0), p.alpha2 * grad(1), 0.5 * (p.beta2 * grad(3) - p.beta1 * grad(2)),
            (1.0 - p.rho * p.rho) * grad(4);
        return out;
    }
};

std::string describe(const Ubbs1Params& p) { return p.to_string(); }

}  // namespace

std::string_view to_string(Method m) { return m == Method::mle ? "mle" : "mps"; }

Method parse_method(std::string_view text) {
    if (text == "mle") return Method::mle;
    if (text == "mps") return Method::mps;
    throw std::invalid_argument("unknown method '" + std::string(text) + "' (expected mle or mps)");
}

ParamVector ParamTransform::forward(const Ubbs1Params& p) {
    p.validate();
    return {std::log(p.alpha1), std::log(p.alpha2), std::log(p.beta1), std::log(p.beta2), std::atanh(p.rho)};
}

Ubbs1Params ParamTransform::backward(const Eigen::Ref<const ParamVector>& x) {
    const double bound = 1.0 - kRhoMargin;
    auto positive = [](double v) {
        return std::clamp(std::exp(v), std::numeric_limits<double>::min(), std::numeric_limits<double>::max());
    };
    const double rho = std::isnan(x(4)) ? 0.0 : std::clamp(std::tanh(x(4)), -bound, bound);
    return {positive(x(0)), positive(x(1)), positive(x(2)), positive(x(3)), rho};
}

double log_likelihood(const UnitSample& sample, const Ubbs1Params& p) {
    p.validate();
    double sum = 0.0;
    for (double z : sample.values()) {
        const double log_s = log_odds(z);
        sum += detail::log_kernel(std::exp(log_s), log_s, p);
    }
    return sum;
}

double log_density(const UnitSample& sample, const Ubbs1Params& p) {
    double sum = log_likelihood(sample, p);
    for (double z : sample.values()) sum -= std::log(z) + std::log1p(-z);
    return sum;
}

ParamVector log_likelihood_gradient(const UnitSample& sample, const Ubbs1Params& p) {
    p.validate();
    ParamVector g = ParamVector::Zero();
    for (double z : sample.values()) g += kernel_gradient(log_odds(z), p);
    return g;
}

Spacings spacings(const UnitSample& sample, const Ubbs1Params& p, const CdfOptions& opts) {
    const auto& z = sample.sorted();
    const auto tails = cdf_tails(std::span<const double>(z), p, opts);
    const std::size_t n = z.size();
    Spacings out;
    out.delta.resize(n + 1);
    out.delta[0] = tails[0].lower;
    for (std::size_t i = 1; i < n; ++i) {
        // Difference whichever tail is smaller so neither end loses precision.
        out.delta[i] = tails[i].lower <= 0.5 ? tails[i].lower - tails[i - 1].lower : tails[i - 1].upper - tails[i].upper;
    }
    out.delta[n] = tails[n - 1].upper;
    for (double& d : out.delta) {
        if (!(d >= kSpacingFloor)) {
            d = kSpacingFloor;
            ++out.floored;
        }
    }
    return out;
}

double mps_objective(const UnitSample& sample, const Ubbs1Params& p, const CdfOptions& opts) {
    if (sample.n() < 2) throw InsufficientData("mps_objective: need at least 2 observations");
    const Spacings sp = spacings(sample, p, opts);
    double sum = 0.0;
    for (double d : sp.delta) sum += std::log(d);
    return sum / static_cast<double>(sp.delta.size());
}

InformationCriteria information_criteria(double loglik, int k, Eigen::Index n) {
    return {-2.0 * loglik + 2.0 * k, -2.0 * loglik + k * std::log(static_cast<double>(n))};
}

FitResult fit(const UnitSample& sample, Method method, const std::optional<Ubbs1Params>& init,
              const OptimizerConfig& config) {
    const Eigen::Index n = sample.n();
    if (n < 6) throw InsufficientData("fit: need at least 6 observations for 5 parameters, got " + std::to_string(n));
    if (init) init->validate();
    if (!(config.beta_scale > 0.0)) throw ParameterError("fit: beta_scale must be positive");

    const Reduced reduced{init ? 0.5 * (std::log(init->beta1) + std::log(init->beta2)) : std::log(config.beta_scale)};
    const double inv_n = 1.0 / static_cast<double>(n);

    // Minimised objective: -l / n or -H.
    optim::Objective objective = [&](const Eigen::VectorXd& xi) {
        try {
            const Ubbs1Params p = reduced.params(xi);
            return method == Method::mle ? -log_likelihood(sample, p) * inv_n : -mps_objective(sample, p, config.cdf);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    optim::ObjectiveWithGradient with_gradient = [&](const Eigen::VectorXd& xi, Eigen::VectorXd& grad) {
        if (method == Method::mps) {
            grad = optim::central_gradient(objective, xi, config.fd_step);
            return objective(xi);
        }
        try {
            const Ubbs1Params p = reduced.params(xi);
            grad = -reduced.chain(log_likelihood_gradient(sample, p), p) * inv_n;
            return -log_likelihood(sample, p) * inv_n;
        } catch (const std::exception&) {
            grad = Eigen::VectorXd::Constant(4, std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::infinity();
        }
    };

    // Candidate starts: shape grid times correlation grid, scale ratio from the sample median.
    const double m = std::clamp(sample.median(), 1e-6, 1.0 - 1e-6);
    const double d0 = std::log(m / (1.0 - m));
    std::vector<Eigen::VectorXd> candidates;
    if (init) candidates.push_back(reduced.coords(*init));
    for (double a1 : {0.3, 0.8, 1.5})
        for (double a2 : {0.3, 0.8, 1.5})
            for (double rho : {-0.5, 0.0, 0.5}) {
                Eigen::VectorXd xi(4);
                xi << std::log(a1), std::log(a2), d0, std::atanh(rho);
                candidates.push_back(xi);
            }
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = objective(candidates[i]);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(config.starts, 1))));

    struct Outcome {
        optim::MinimizeResult res;
        bool converged;
        int iterations;
    };
    std::vector<Outcome> outcomes;
    for (std::size_t idx : order) {
        if (!std::isfinite(scores[idx])) continue;
        const auto coarse = optim::nelder_mead(objective, candidates[idx],
                                               {config.nm_max_evaluations, 1e-10, 1e-6, 0.3});
        optim::BfgsOptions polish{config.bfgs_max_iterations, 1e-9, 1e-15};
        if (method == Method::mps) polish = {config.bfgs_max_iterations, config.grad_tol, config.rel_tol};
        auto fine = optim::bfgs(with_gradient, coarse.x, polish);
        if (!(fine.f <= coarse.f)) {
            fine.x = coarse.x;
            fine.f = coarse.f;
        }
        Eigen::VectorXd grad(4);
        with_gradient(fine.x, grad);
        fine.gradient_norm = grad.cwiseAbs().maxCoeff();
        bool converged = std::isfinite(fine.f) && fine.gradient_norm < config.grad_tol;
        if (method == Method::mps && std::isfinite(fine.f) && fine.last_rel_change < config.rel_tol) converged = true;
        outcomes.push_back({fine, converged, coarse.iterations + fine.iterations});
    }

    const Outcome* best = nullptr;
    int n_converged = 0;
    for (const auto& o : outcomes) {
        if (!o.converged) continue;
        ++n_converged;
        if (!best || o.res.f < best->res.f) best = &o;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "fit(" << to_string(method) << "): none of " << outcomes.size() << " starts converged";
        for (const auto& o : outcomes)
            msg << "; f=" << o.res.f << " |grad|=" << o.res.gradient_norm << " at " << describe(reduced.params(o.res.x));
        throw ConvergenceError(msg.str());
    }

    FitResult out;
    out.params = reduced.params(best->res.x);
    out.method = method;
    out.loglik = log_likelihood(sample, out.params);
    out.objective = method == Method::mle ? out.loglik : -best->res.f;
    const auto ic = information_criteria(out.loglik, kParams, n);
    out.aic = ic.aic;
    out.bic = ic.bic;
    out.converged = true;
    out.iterations = best->iterations;
    out.gradient_norm = best->res.gradient_norm;
    out.starts_converged = n_converged;
    if (method == Method::mps) {
        const int floored = spacings(sample, out.params, config.cdf).floored;
        if (floored > 0)
            out.warnings.push_back(std::to_string(floored) + " spacing(s) floored at 1e-300 (tied or rounded observations)");
    }
    return out;
}

double beta_log_likelihood(const UnitSample& sample, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("beta_log_likelihood: shapes must be positive");
    double s1 = 0.0, s2 = 0.0;
    for (double z : sample.values()) {
        s1 += std::log(z);
        s2 += std::log1p(-z);
    }
    const double n = static_cast<double>(sample.n());
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return (a - 1.0) * s1 + (b - 1.0) * s2 - n * log_beta;
}

BetaFitResult fit_beta_baseline(const UnitSample& sample) {
    const Eigen::Index count = sample.n();
    if (count < 2) throw InsufficientData("fit_beta_baseline: need at least 2 observations");
    const auto z = sample.as_vector();
    const double n = static_cast<double>(count);
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / (n - 1.0);
    const double common = var > 0.0 ? mean * (1.0 - mean) / var - 1.0 : 1.0;
    double a = common > 0.0 ? mean * common : 1.0;
    double b = common > 0.0 ? (1.0 - mean) * common : 1.0;

    const double mean_log = z.array().log().mean();
    const double mean_log1m = (-z.array()).log1p().mean();

    BetaFitResult out;
    for (out.iterations = 0; out.iterations < 200; ++out.iterations) {
        const double psi_ab = specfun::digamma(a + b), tri_ab = specfun::trigamma(a + b);
        const Eigen::Vector2d score(mean_log - specfun::digamma(a) + psi_ab, mean_log1m - specfun::digamma(b) + psi_ab);
        Eigen::Matrix2d info;
        info << specfun::trigamma(a) - tri_ab, -tri_ab, -tri_ab, specfun::trigamma(b) - tri_ab;
        Eigen::Vector2d step = info.ldlt().solve(score);
        // Halve until both shapes stay positive.
        while (a + step(0) <= 0.0 || b + step(1) <= 0.0) step *= 0.5;
        a += step(0);
        b += step(1);
        if (std::abs(step(0)) <= 1e-12 * a && std::abs(step(1)) <= 1e-12 * b) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) throw ConvergenceError("fit_beta_baseline: Newton iteration did not converge");
    out.a = a;
    out.b = b;
    out.loglik = beta_log_likelihood(sample, a, b);
    const auto ic = information_criteria(out.loglik, 2, count);
    out.aic = ic.aic;
    out.bic = ic.bic;
    return out;
}

}  // namespace ubbs1
