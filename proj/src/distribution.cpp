#include "ubbs1/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ubbs1/specfun.hpp"

namespace ubbs1 {

namespace {

using std::numbers::pi;

void require_unit(double z, const char* who) {
    if (!(z > 0.0 && z < 1.0)) throw DomainError(std::string(who) + ": z must lie in (0, 1), got " + std::to_string(z));
}

// log(e^a + e^b)
double log_add_exp(double a, double b) {
    const double hi = std::max(a, b);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(e^m + e^{-m})
double log_two_cosh(double m) {
    const double a = std::abs(m);
    return a + std::log1p(std::exp(-2.0 * a));
}

// s = (1 - z)/z with log s = log1p(-z) - log z.
struct Odds {
    double s;
    double log_s;
};

Odds odds(double z) { return {(1.0 - z) / z, std::log1p(-z) - std::log(z)}; }

UvIntermediates make_uv(double s, double log_s, const Ubbs1Params& p) {
    // u = (a - rho b)^2 + (1 - rho^2) b^2 with a = sqrt(s/beta1)/alpha1, b = 1/(alpha2 sqrt(beta2)),
    // and likewise for v; both stay positive under rounding.
    const double q = 1.0 - p.rho * p.rho;
    const double a = std::exp(0.5 * (log_s - std::log(p.beta1))) / p.alpha1;
    const double b = 1.0 / (p.alpha2 * std::sqrt(p.beta2));
    const double c = std::exp(0.5 * (std::log(p.beta1) - log_s)) / p.alpha1;
    const double d = std::sqrt(p.beta2) / p.alpha2;
    const double u = (a - p.rho * b) * (a - p.rho * b) + q * b * b;
    const double v = (c - p.rho * d) * (c - p.rho * d) + q * d * d;
    return {s, log_s, u, v};
}

// Coefficients of the erf argument c1 w + c2 / (alpha2 w + sqrt((alpha2 w)^2 + 4)).
struct ErfArgument {
    double c1;
    double c2;
};

ErfArgument erf_argument(double log_s, const Ubbs1Params& p) {
    const double q = 1.0 - p.rho * p.rho;
    const double r = std::exp(0.5 * (std::log(p.beta2) + log_s - std::log(p.beta1)));  // sqrt(s beta2 / beta1)
    const double c1 = (p.alpha2 / p.alpha1 * r - p.rho) / std::sqrt(2.0 * q);
    const double c2 = std::numbers::sqrt2 * (r - 1.0 / r) / (p.alpha1 * std::sqrt(q));
    return {c1, c2};
}

// 1 / (a w + sqrt((a w)^2 + 4)); the conjugate form avoids cancellation for w < 0.
double inv_denominator(double alpha2, double w) {
    const double aw = alpha2 * w;
    const double root = std::sqrt(aw * aw + 4.0);
    return aw >= 0.0 ? 1.0 / (aw + root) : (root - aw) / 4.0;
}

// Gauss-Hermite nodes mapped to the N(0,1) weight: w = sqrt(2) x, weight / sqrt(pi).
struct NormalRule {
    std::vector<double> w;
    std::vector<double> weight;
    std::vector<double> inv_d;
};

NormalRule normal_rule(int order, double alpha2) {
    const auto& rule = specfun::gauss_hermite_rule(order);
    NormalRule out;
    const auto n = static_cast<std::size_t>(rule.order());
    out.w.resize(n);
    out.weight.resize(n);
    out.inv_d.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.w[k] = std::numbers::sqrt2 * rule.nodes(static_cast<Eigen::Index>(k));
        out.weight[k] = rule.weights(static_cast<Eigen::Index>(k)) / std::sqrt(pi);
        out.inv_d[k] = inv_denominator(alpha2, out.w[k]);
    }
    return out;
}

TailProbabilities tails_on_rule(const ErfArgument& arg, const NormalRule& rule) {
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < rule.w.size(); ++k) {
        const double x = arg.c1 * rule.w[k] + arg.c2 * rule.inv_d[k];
        const double small = 0.5 * std::erfc(std::abs(x));
        if (x >= 0.0) {
            lower += rule.weight[k] * small;
            upper += rule.weight[k] * (1.0 - small);
        } else {
            lower += rule.weight[k] * (1.0 - small);
            upper += rule.weight[k] * small;
        }
    }
    return {lower, upper};
}

// Adaptive evaluation of the smaller tail; used when Gauss-Hermite fails its self-check.
TailProbabilities tails_adaptive(const ErfArgument& arg, double alpha2, bool lower_is_small) {
    const double sign = lower_is_small ? 1.0 : -1.0;
    auto integrand = [&](double w) {
        const double x = arg.c1 * w + arg.c2 * inv_denominator(alpha2, w);
        return 0.5 * std::erfc(sign * x) * specfun::std_normal_pdf(w);
    };
    const specfun::IntegrationOptions opts{1e-15, 1e-11, 10000};
    double small = 0.0;
    for (auto [a, b] : {std::pair{-38.5, -9.0}, std::pair{-9.0, 9.0}, std::pair{9.0, 38.5}}) {
        try {
            small += specfun::integrate_adaptive(integrand, a, b, opts).value;
        } catch (const specfun::IntegrationError& e) {
            if (e.best_estimate().err_est > 1e-10) throw;
            small += e.best_estimate().value;
        }
    }
    small = std::clamp(small, 0.0, 1.0);
    return lower_is_small ? TailProbabilities{small, 1.0 - small} : TailProbabilities{1.0 - small, small};
}

TailProbabilities clamp_tails(TailProbabilities t) {
    return {std::clamp(t.lower, 0.0, 1.0), std::clamp(t.upper, 0.0, 1.0)};
}

class TailEvaluator {
public:
    TailEvaluator(const Ubbs1Params& p, const CdfOptions& opts) : p_(p), opts_(opts), base_(normal_rule(opts.order, p.alpha2)) {
        if (opts.validate) fine_ = normal_rule(std::min(2 * opts.order, 512), p.alpha2);
    }

    TailProbabilities operator()(double log_s) const {
        const ErfArgument arg = erf_argument(log_s, p_);
        const TailProbabilities coarse = tails_on_rule(arg, base_);
        if (!opts_.validate) return clamp_tails(coarse);
        const TailProbabilities fine = tails_on_rule(arg, fine_);
        if (std::abs(coarse.lower - fine.lower) <= opts_.agreement && std::abs(coarse.upper - fine.upper) <= opts_.agreement)
            return clamp_tails(fine);
        return tails_adaptive(arg, p_.alpha2, fine.lower <= 0.5);
    }

private:
    Ubbs1Params p_;
    CdfOptions opts_;
    NormalRule base_;
    NormalRule fine_;
};

}  // namespace

UvIntermediates uv_intermediates(double z, const Ubbs1Params& p) {
    require_unit(z, "uv_intermediates");
    p.validate();
    const auto [s, log_s] = odds(z);
    return make_uv(s, log_s, p);
}

namespace detail {

double log_kernel(double s, double log_s, const Ubbs1Params& p) {
    const double q = 1.0 - p.rho * p.rho;
    const UvIntermediates uv = make_uv(s, log_s, p);
    const double log_u = std::log(uv.u_rho);
    const double log_v = std::log(uv.v_rho);
    const double x = std::exp(0.5 * (log_u + log_v)) / q;

    const double log_r = 0.5 * (std::log(p.beta2) + log_s - std::log(p.beta1));
    const double log_t = 0.5 * (log_v - log_u + log_s - std::log(p.beta1) - std::log(p.beta2));
    const double log_t0 = log_two_cosh(log_r);
    const double log_t1 = log_two_cosh(log_t);
    const double t0 = std::exp(log_t0);

    const double log_bracket = log_add_exp(log_t0 + std::log(specfun::bessel_k_scaled(0, x)),
                                           log_t1 + std::log(specfun::bessel_k_scaled(1, x)));
    const double a_sum = 1.0 / (p.alpha1 * p.alpha1) + 1.0 / (p.alpha2 * p.alpha2);
    const double exponent = a_sum / q - p.rho * t0 / (p.alpha1 * p.alpha2 * q) - x;
    return exponent - std::log(4.0 * pi * p.alpha1 * p.alpha2 * std::sqrt(q)) + log_bracket;
}

}  // namespace detail

double log_pdf(double z, const Ubbs1Params& p) {
    require_unit(z, "log_pdf");
    p.validate();
    const auto [s, log_s] = odds(z);
    // log((s+1)^2 / s) = -log z - log(1 - z)
    return detail::log_kernel(s, log_s, p) - std::log(z) - std::log1p(-z);
}

double pdf(double z, const Ubbs1Params& p) { return std::exp(log_pdf(z, p)); }

double pdf_independent(double z, const Ubbs1Params& p) {
    require_unit(z, "pdf_independent");
    p.validate();
    if (p.rho != 0.0) throw ParameterError("pdf_independent: requires rho = 0");
    const double s = 1.0 / z - 1.0;
    const double a1 = p.alpha1, a2 = p.alpha2, b1 = p.beta1, b2 = p.beta2;
    const double u = s / (a1 * a1 * b1) + 1.0 / (a2 * a2 * b2);
    const double v = b1 / (a1 * a1 * s) + b2 / (a2 * a2);
    const double x = std::sqrt(u * v);
    const double k0 = specfun::bessel_k_scaled(0, x) * std::exp(-x);
    const double k1 = specfun::bessel_k_scaled(1, x) * std::exp(-x);
    const double t0 = std::sqrt(b2 * s / b1) + std::sqrt(b1 / (b2 * s));
    const double t = std::sqrt((v / u) * s / (b1 * b2));
    const double prefactor = std::exp(1.0 / (a1 * a1) + 1.0 / (a2 * a2)) / (4.0 * pi * a1 * a2);
    return prefactor * (s + 1.0) * (s + 1.0) / s * (t0 * k0 + (t + 1.0 / t) * k1);
}

double type2_ratio_pdf(double s, const Ubbs1Params& p) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("type2_ratio_pdf: s must be positive");
    p.validate();
    if (p.rho != 0.0) throw ParameterError("type2_ratio_pdf: only defined for independent components (rho = 0)");
    const double log_s = std::log(s);
    return std::exp(detail::log_kernel(s, log_s, p) - log_s);
}

TailProbabilities cdf_tails(double z, const Ubbs1Params& p, const CdfOptions& opts) {
    require_unit(z, "cdf");
    p.validate();
    return TailEvaluator(p, opts)(odds(z).log_s);
}

std::vector<TailProbabilities> cdf_tails(std::span<const double> z, const Ubbs1Params& p, const CdfOptions& opts) {
    p.validate();
    for (double zi : z) require_unit(zi, "cdf");
    const TailEvaluator eval(p, opts);
    std::vector<TailProbabilities> out;
    out.reserve(z.size());
    for (double zi : z) out.push_back(eval(odds(zi).log_s));
    return out;
}

double cdf(double z, const Ubbs1Params& p, const CdfOptions& opts) { return cdf_tails(z, p, opts).lower; }

double survival(double z, const Ubbs1Params& p, const CdfOptions& opts) { return cdf_tails(z, p, opts).upper; }

double quantile(double q, const Ubbs1Params& p, const CdfOptions& opts) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile: q must lie in (0, 1)");
    p.validate();
    const TailEvaluator eval(p, opts);
    const bool upper_side = q > 0.5;
    // residual > 0  <=>  z is above the target
    auto residual = [&](double z) {
        const TailProbabilities t = eval(odds(z).log_s);
        return upper_side ? (1.0 - q) - t.upper : t.lower - q;
    };

    double lo = 0.0, hi = 1.0, z = 0.5;
    for (int iter = 0; iter < 400; ++iter) {
        const double r = residual(z);
        if (std::abs(r) <= 1e-13) return z;
        (r > 0.0 ? hi : lo) = z;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(z, 1e-300)) return z;
        const double density = pdf(z, p);
        double next = density > 0.0 && std::isfinite(density) ? z - r / density : -1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        z = next;
    }
    throw ConvergenceError("quantile: root finding did not converge");
}

double moment(int n, const Ubbs1Params& p, const CdfOptions& opts) {
    if (n < 1) throw DomainError("moment: order must be at least 1");
    p.validate();
    const TailEvaluator eval(p, opts);
    constexpr double eps = 1e-12;
    auto integrand = [&](double z) { return n * std::pow(z, n - 1) * eval(odds(z).log_s).upper; };
    return specfun::integrate_adaptive(integrand, eps, 1.0 - eps, 1e-9).value;
}

double mgf(double t, const Ubbs1Params& p, int terms, const CdfOptions& opts) {
    if (terms < 1) throw DomainError("mgf: terms must be at least 1");
    if (!(std::abs(t) <= 50.0)) throw DomainError("mgf: |t| must not exceed 50");
    p.validate();
    if (t == 0.0) return 1.0;
    double sum = 1.0, power = 1.0;
    for (int n = 1; n <= terms; ++n) {
        power *= t / n;
        sum += moment(n, p, opts) * power;
    }
    return sum;
}

double stress_strength(const Ubbs1Params& p, const CdfOptions& opts) {
    p.validate();
    // R = 1/2 + 1/2 int erf(c1 w + c2 / (alpha2 w + sqrt((alpha2 w)^2 + 4))) phi(w) dw
    const double q = 1.0 - p.rho * p.rho;
    const double c1 = (p.alpha2 / p.alpha1 * std::sqrt(p.beta2 / p.beta1) - p.rho) / std::sqrt(2.0 * q);
    const double c2 = std::numbers::sqrt2 * (p.beta2 - p.beta1) / (p.alpha1 * std::sqrt(p.beta1 * p.beta2 * q));
    auto integrand_on = [&](const NormalRule& rule) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.w.size(); ++k)
            acc += rule.weight[k] * std::erf(c1 * rule.w[k] + c2 * rule.inv_d[k]);
        return 0.5 + 0.5 * acc;
    };
    const double coarse = integrand_on(normal_rule(opts.order, p.alpha2));
    if (!opts.validate) return std::clamp(coarse, 0.0, 1.0);
    const double fine = integrand_on(normal_rule(std::min(2 * opts.order, 512), p.alpha2));
    if (std::abs(coarse - fine) <= opts.agreement) return std::clamp(fine, 0.0, 1.0);

    auto integrand = [&](double w) {
        return std::erf(c1 * w + c2 * inv_denominator(p.alpha2, w)) * specfun::std_normal_pdf(w);
    };
    double acc = 0.0;
    for (auto [a, b] : {std::pair{-38.5, -9.0}, std::pair{-9.0, 9.0}, std::pair{9.0, 38.5}})
        acc += specfun::integrate_adaptive(integrand, a, b, specfun::IntegrationOptions{1e-14, 1e-12, 10000}).value;
    return std::clamp(0.5 + 0.5 * acc, 0.0, 1.0);
}

std::vector<double> ModalityReport::modes() const {
    std::vector<double> out;
    for (const auto& c : critical_points)
        if (c.kind == CriticalKind::max) out.push_back(c.z);
    return out;
}

ModalityReport classify_modality(const Ubbs1Params& p, int grid_size) {
    if (grid_size < 501) throw DomainError("classify_modality: grid_size must be at least 501");
    p.validate();
    constexpr double h = 1e-6;
    constexpr double z_tol = 1e-9;
    auto slope = [&](double z) { return (log_pdf(z + h, p) - log_pdf(z - h, p)) / (2.0 * h); };

    const double spacing = 1.0 / (grid_size + 1);
    ModalityReport report;
    double prev_z = spacing;
    double prev_d = slope(prev_z);
    // The density vanishes at both ends, so a negative slope at the first grid
    // point means a mode sits between 0 and the grid.
    if (prev_d < 0.0) report.critical_points.push_back({0.5 * spacing, CriticalKind::max});

    for (int k = 2; k <= grid_size; ++k) {
        const double z = k * spacing;
        const double d = slope(z);
        if ((prev_d > 0.0) != (d > 0.0)) {
            const bool rising_at_left = prev_d > 0.0;
            double lo = prev_z, hi = z;
            while (hi - lo > z_tol) {
                const double mid = 0.5 * (lo + hi);
                ((slope(mid) > 0.0) == rising_at_left ? lo : hi) = mid;
            }
            report.critical_points.push_back({0.5 * (lo + hi), rising_at_left ? CriticalKind::max : CriticalKind::min});
        }
        prev_z = z;
        prev_d = d;
    }
    if (prev_d > 0.0) report.critical_points.push_back({1.0 - 0.5 * spacing, CriticalKind::max});

    if (report.critical_points.size() > 3)
        throw NumericalAnomaly("classify_modality: found " + std::to_string(report.critical_points.size()) +
                               " critical points; at most 3 are expected");
    report.kind = report.modes().size() >= 2 ? ModalityKind::bimodal : ModalityKind::unimodal;
    return report;
}

}  // namespace ubbs1
