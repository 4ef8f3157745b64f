#pragma once

// Special functions and quadrature used by the density, CDF and moment code.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "ubbs1/errors.hpp"

namespace ubbs1::specfun {

/// e^x K_order(x) for order in {0, 1} and x > 0.
///
/// The scaled form keeps log-space density evaluation free of overflow: callers
/// recover K via K = e^{-x} * bessel_k_scaled(order, x), or more usually fold
/// the -x straight into a log.
double bessel_k_scaled(int order, double x);

double erf(double x);
double erfc(double x);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

// Used by the Beta baseline fit.
double digamma(double x);
double trigamma(double x);

enum class QuadratureKind { gauss_hermite, gauss_legendre_adaptive };

struct QuadratureRule {
    Eigen::VectorXd nodes;    ///< strictly increasing
    Eigen::VectorXd weights;  ///< strictly positive
    QuadratureKind kind = QuadratureKind::gauss_hermite;

    int order() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Hermite rule for the weight e^{-x^2} (physicists' convention), order in [2, 512].
/// Rules are computed once per order and cached; the returned reference stays valid.
const QuadratureRule& gauss_hermite_rule(int order);

struct IntegrationResult {
    double value = 0.0;
    double err_est = 0.0;
    int panels = 0;
};

struct IntegrationOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_panels = 10000;
};

class IntegrationError : public ConvergenceError {
public:
    IntegrationError(const std::string& what, IntegrationResult best)
        : ConvergenceError(what), best_(best) {}
    const IntegrationResult& best_estimate() const noexcept { return best_; }

private:
    IntegrationResult best_;
};

namespace detail {

// QUADPACK qk15 abscissae/weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 7-15 quadrature with global bisection of the worst panel.
///
/// Stops once the summed error estimate drops below max(abs_tol, rel_tol*|value|).
/// Throws IntegrationError (carrying the best estimate) when the panel budget runs out.
template <typename F>
IntegrationResult integrate_adaptive(const F& f, double a, double b, const IntegrationOptions& opts) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate_adaptive: requires finite a < b");
    if (!(opts.abs_tol > 0.0 || opts.rel_tol > 0.0))
        throw DomainError("integrate_adaptive: tolerance must be positive");

    std::priority_queue<detail::Panel> heap;
    std::vector<detail::Panel> settled;  // panels too narrow to split further
    heap.push(detail::gauss_kronrod_15(f, a, b));
    double total = heap.top().value;
    double error = heap.top().error;
    int panels = 1;

    auto finished = [&] { return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (!finished()) {
        if (heap.empty() || panels >= opts.max_panels) {
            throw IntegrationError("integrate_adaptive: panel budget exhausted",
                                   {total, error, panels});
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(worst.a), std::abs(worst.b));
        if (worst.b - worst.a <= min_width || mid <= worst.a || mid >= worst.b) {
            settled.push_back(worst);
            continue;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }

    // Re-sum to shed the drift of the incremental updates.
    double sum = 0.0, err = 0.0;
    for (const auto& p : settled) {
        sum += p.value;
        err += p.error;
    }
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, panels};
}

template <typename F>
IntegrationResult integrate_adaptive(const F& f, double a, double b, double tol) {
    return integrate_adaptive(f, a, b, IntegrationOptions{tol, 0.0, 10000});
}

}  // namespace ubbs1::specfun
