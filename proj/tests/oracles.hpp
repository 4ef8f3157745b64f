#pragma once

// Reference computations that take a different route from the library code.

#include <cmath>
#include <numbers>

#include "ubbs1/bivariate_bs.hpp"
#include "ubbs1/distribution.hpp"
#include "ubbs1/estimation.hpp"
#include "ubbs1/specfun.hpp"

namespace oracle {

/// e^x K_nu(x) from the integral int_0^inf cosh(nu t) exp(-x (cosh t - 1)) dt.
inline double bessel_k_scaled_integral(int nu, double x) {
    auto f = [&](double t) { return std::cosh(nu * t) * std::exp(-x * (std::expm1(t) + std::expm1(-t)) / 2.0); };
    // The integrand decays like exp(-x e^t / 2); cut where that is negligible.
    const double upper = std::log(2.0 * 800.0 / x + 2.0) + 1.0;
    ubbs1::specfun::IntegrationOptions opts{0.0, 1e-11, 10000};
    double sum = 0.0;
    const int pieces = 64;
    for (int k = 0; k < pieces; ++k)
        sum += ubbs1::specfun::integrate_adaptive(f, upper * k / pieces, upper * (k + 1) / pieces, opts).value;
    return sum;
}

/// Maclaurin series of erf, fine for |x| <= 3.
inline double erf_series(double x) {
    double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        sum += term / (2 * n + 1);
    }
    return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

/// Density of Y / (X + Y) from f_Z(z) = z^-2 int_0^inf y f_{X,Y}(s y, y) dy with s = (1 - z)/z.
/// The y-integral runs over t = log y in unit pieces.
inline double pdf_integral_form(double z, const ubbs1::Ubbs1Params& p) {
    const double s = (1.0 - z) / z;
    const auto biv = p.bivariate();
    auto f = [&](double t) {
        const double y = std::exp(t);
        const double v = y * y * ubbs1::biv_bs_pdf(s * y, y, biv);
        return std::isfinite(v) ? v : 0.0;
    };
    ubbs1::specfun::IntegrationOptions opts{0.0, 1e-12, 10000};
    double sum = 0.0;
    for (int k = -40; k < 40; ++k) sum += ubbs1::specfun::integrate_adaptive(f, k, k + 1, opts).value;
    return sum / (z * z);
}

/// int_0^1 g(z) f_Z(z) dz with the density integrated in pieces.
template <typename G>
double expect(G g, const ubbs1::Ubbs1Params& p, double tol = 1e-12) {
    auto f = [&](double z) { return g(z) * ubbs1::pdf(z, p); };
    ubbs1::specfun::IntegrationOptions opts{tol, 0.0, 10000};
    double sum = 0.0;
    const double edges[] = {1e-300, 1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 1 - 1e-3, 1 - 1e-6, 1.0};
    for (std::size_t k = 0; k + 1 < std::size(edges); ++k)
        sum += ubbs1::specfun::integrate_adaptive(f, edges[k], edges[k + 1], opts).value;
    return sum;
}

inline double normalization(const ubbs1::Ubbs1Params& p) {
    return expect([](double) { return 1.0; }, p);
}

/// Central difference of the log-likelihood in parameter k, step 1e-6 max(1, |theta_k|).
inline double fd_partial(const ubbs1::UnitSample& s, const ubbs1::Ubbs1Params& p, int k) {
    ubbs1::ParamVector v = p.to_vector();
    const double h = 1e-6 * std::max(1.0, std::abs(v(k)));
    ubbs1::ParamVector up = v, dn = v;
    up(k) += h;
    dn(k) -= h;
    return (ubbs1::log_likelihood(s, ubbs1::Ubbs1Params::from_vector(up)) -
            ubbs1::log_likelihood(s, ubbs1::Ubbs1Params::from_vector(dn))) /
           (2.0 * h);
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic of sorted data against a CDF.
template <typename Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf cdf) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace oracle
