#pragma once

// Birnbaum-Saunders building blocks. Everything here is templated on the
// scalar type so the same expressions can be evaluated with Eigen's
// AutoDiffScalar (used by the tests) as well as plain double.

#include <cmath>
#include <numbers>
#include <string>

#include "ubbs1/errors.hpp"
#include "ubbs1/specfun.hpp"

namespace ubbs1 {

template <typename Scalar>
struct BsParams {
    Scalar alpha;  ///< shape
    Scalar beta;   ///< scale (median)

    void validate() const {
        if (!(alpha > Scalar(0)) || !(beta > Scalar(0)))
            throw ParameterError("BsParams: alpha and beta must be positive");
    }
};

template <typename Scalar>
struct BivBsParams {
    BsParams<Scalar> x;
    BsParams<Scalar> y;
    Scalar rho;  ///< correlation on the normal scale

    void validate() const {
        x.validate();
        y.validate();
        if (!(rho > Scalar(-1)) || !(rho < Scalar(1)))
            throw ParameterError("BivBsParams: rho must lie in (-1, 1)");
    }

    BivBsParams swapped() const { return {y, x, rho}; }
};

using BsParamsd = BsParams<double>;
using BivBsParamsd = BivBsParams<double>;

namespace detail {
template <typename Scalar>
void require_positive(const Scalar& t, const char* who) {
    if (!(t > Scalar(0))) throw DomainError(std::string(who) + ": argument must be positive");
}
}  // namespace detail

/// a(t) = (sqrt(t/beta) - sqrt(beta/t)) / alpha; a standard normal variate when t ~ BS(alpha, beta).
template <typename Scalar>
Scalar a_transform(const Scalar& t, const BsParams<Scalar>& p) {
    using std::sqrt;
    detail::require_positive(t, "a_transform");
    return (sqrt(t / p.beta) - sqrt(p.beta / t)) / p.alpha;
}

template <typename Scalar>
Scalar a_derivative(const Scalar& t, const BsParams<Scalar>& p) {
    using std::sqrt;
    detail::require_positive(t, "a_derivative");
    return (sqrt(t / p.beta) + sqrt(p.beta / t)) / (Scalar(2) * p.alpha * t);
}

template <typename Scalar>
Scalar a_inverse(const Scalar& u, const BsParams<Scalar>& p) {
    using std::sqrt;
    const Scalar au = p.alpha * u;
    // For au < 0 the sum au + sqrt(au^2 + 4) cancels; use the conjugate form.
    const Scalar root = sqrt(au * au + Scalar(4));
    const Scalar base = au >= Scalar(0) ? au + root : Scalar(4) / (root - au);
    return p.beta / Scalar(4) * base * base;
}

template <typename Scalar>
Scalar bs_pdf(const Scalar& t, const BsParams<Scalar>& p) {
    using std::exp;
    const Scalar a = a_transform(t, p);
    return exp(-a * a / Scalar(2)) / Scalar(std::sqrt(2.0 * std::numbers::pi)) * a_derivative(t, p);
}

inline double bs_cdf(double t, const BsParamsd& p) { return specfun::std_normal_cdf(a_transform(t, p)); }

/// log of the standard bivariate normal density with correlation rho.
template <typename Scalar>
Scalar log_phi2(const Scalar& u, const Scalar& v, const Scalar& rho) {
    using std::log;
    using std::sqrt;
    const Scalar q = Scalar(1) - rho * rho;
    return -log(Scalar(2 * std::numbers::pi) * sqrt(q)) - (u * u + v * v - Scalar(2) * rho * u * v) / (Scalar(2) * q);
}

/// Joint density phi2(a(x), a(y); rho) a'(x) a'(y).
template <typename Scalar>
Scalar biv_bs_pdf(const Scalar& x, const Scalar& y, const BivBsParams<Scalar>& p) {
    using std::exp;
    detail::require_positive(x, "biv_bs_pdf");
    detail::require_positive(y, "biv_bs_pdf");
    const Scalar ax = a_transform(x, p.x);
    const Scalar ay = a_transform(y, p.y);
    return exp(log_phi2(ax, ay, p.rho)) * a_derivative(x, p.x) * a_derivative(y, p.y);
}

/// P(X <= x | Y = y) = Phi((a(x) - rho a(y)) / sqrt(1 - rho^2)).
inline double conditional_cdf_x_given_y(double x, double y, const BivBsParamsd& p) {
    detail::require_positive(x, "conditional_cdf_x_given_y");
    detail::require_positive(y, "conditional_cdf_x_given_y");
    const double num = a_transform(x, p.x) - p.rho * a_transform(y, p.y);
    return specfun::std_normal_cdf(num / std::sqrt(1.0 - p.rho * p.rho));
}

}  // namespace ubbs1
