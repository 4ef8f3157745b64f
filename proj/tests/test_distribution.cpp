#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ubbs1/distribution.hpp"

using namespace ubbs1;
using doctest::Approx;

namespace {

Ubbs1Params random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> a(0.2, 2.0), b(0.5, 2.0), r(-0.9, 0.9);
    return {a(gen), a(gen), b(gen), b(gen), r(gen)};
}

}  // namespace

TEST_CASE("uv intermediates are positive quadratic forms") {
    const Ubbs1Params p{0.5, 0.7, 1.2, 0.8, 0.999999};
    for (double z : {1e-9, 0.3, 0.5, 1.0 - 1e-9}) {
        const auto uv = uv_intermediates(z, p);
        CHECK(uv.s == Approx((1.0 - z) / z).epsilon(1e-15));
        CHECK(uv.u_rho > 0.0);
        CHECK(uv.v_rho > 0.0);
    }
    // Against the expanded definition at moderate rho.
    const Ubbs1Params q{0.5, 0.7, 1.2, 0.8, 0.3};
    const auto uv = uv_intermediates(0.4, q);
    const double s = 1.5;
    const double u = s / (0.25 * 1.2) + 1.0 / (0.49 * 0.8) - 2 * 0.3 * std::sqrt(s / (1.2 * 0.8)) / (0.5 * 0.7);
    const double v = 1.2 / (0.25 * s) + 0.8 / 0.49 - 2 * 0.3 * std::sqrt(1.2 * 0.8 / s) / (0.5 * 0.7);
    CHECK(uv.u_rho == Approx(u).epsilon(1e-14));
    CHECK(uv.v_rho == Approx(v).epsilon(1e-14));
}

TEST_CASE("density: independent closed form and integral form") {
    const Ubbs1Params p0{0.5, 0.5, 1.0, 1.0, 0.0};
    for (double z : {0.2, 0.5, 0.8}) CHECK(pdf(z, p0) == Approx(pdf_independent(z, p0)).epsilon(1e-12));
    CHECK_THROWS_AS(pdf_independent(0.5, Ubbs1Params{0.5, 0.5, 1, 1, 0.1}), ParameterError);

    const Ubbs1Params p{0.5, 0.5, 1.0, 1.0, 0.25};
    CHECK(pdf(0.4, p) == Approx(oracle::pdf_integral_form(0.4, p)).epsilon(1e-8));

    const Ubbs1Params sets[] = {{1.6, 0.7, 1.1, 0.9, 0.6}, {0.3, 1.2, 0.7, 1.8, -0.7}, {2.0, 2.0, 1.0, 1.0, 0.5}};
    for (const auto& q : sets)
        for (double z : {0.05, 0.37, 0.5, 0.81, 0.97}) {
            CAPTURE(z);
            CHECK(pdf(z, q) == Approx(oracle::pdf_integral_form(z, q)).epsilon(1e-7));
        }
}

TEST_CASE("density: symmetry, endpoints and errors") {
    const Ubbs1Params p{0.5, 0.5, 1.0, 1.0, 0.3};
    CHECK(std::abs(log_pdf(0.25, p) - log_pdf(0.75, p)) < 1e-12);
    for (double w = 0.0; w < 0.5; w += 0.01) CHECK(std::abs(pdf(0.5 - w, p) - pdf(0.5 + w, p)) < 1e-10);

    const Ubbs1Params p0{0.5, 0.5, 1.0, 1.0, 0.0};
    CHECK(pdf(1e-12, p0) < 1e-6);
    CHECK(pdf(1.0 - 1e-12, p0) < 1e-6);

    // Exchanging the components reflects the law.
    const Ubbs1Params q{0.4, 1.1, 0.8, 1.7, -0.35};
    for (double z : {0.1, 0.45, 0.9}) CHECK(log_pdf(z, q) == Approx(log_pdf(1.0 - z, q.swapped())).epsilon(1e-12));

    CHECK_THROWS_AS(log_pdf(0.0, p), DomainError);
    CHECK_THROWS_AS(log_pdf(1.0, p), DomainError);
    CHECK_THROWS_AS(log_pdf(NAN, p), DomainError);
    CHECK_THROWS_AS(log_pdf(0.5, Ubbs1Params{-1, 1, 1, 1, 0}), ParameterError);
    CHECK_THROWS_AS(log_pdf(0.5, Ubbs1Params{1, 1, 1, 1, 1.0}), ParameterError);
}

TEST_CASE("density: log-space evaluation survives extreme parameters") {
    // The prefactor exponent here is about 1e3; the direct form would overflow.
    const Ubbs1Params p{0.2, 0.2, 1.0, 1.3, 0.95};
    for (double z = 0.01; z < 1.0; z += 0.01) {
        CHECK(std::isfinite(log_pdf(z, p)));
        CHECK(pdf(z, p) >= 0.0);
    }
    CHECK(oracle::normalization(p) == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("density normalises across a random parameter sweep") {
    std::mt19937_64 gen(2024);
    CHECK(std::abs(oracle::normalization({1.6, 0.7, 1.1, 0.9, 0.6}) - 1.0) < 1e-8);
    for (int i = 0; i < 8; ++i) {
        const auto p = random_params(gen);
        CAPTURE(p.to_string());
        CHECK(std::abs(oracle::normalization(p) - 1.0) < 1e-7);
    }
}

TEST_CASE("type-II ratio density") {
    const Ubbs1Params p{0.5, 0.5, 1.0, 1.0, 0.0};
    for (double s : {0.5, 1.0, 2.0}) {
        const double z = 1.0 / (s + 1.0);
        CHECK(type2_ratio_pdf(s, p) == Approx(pdf(z, p) / ((s + 1.0) * (s + 1.0))).epsilon(1e-12));
    }
    specfun::IntegrationOptions opts{1e-13, 0.0, 10000};
    auto f = [&](double t) { return std::exp(t) * type2_ratio_pdf(std::exp(t), p); };
    double below = 0.0, above = 0.0;
    for (int k = -40; k < 0; ++k) below += specfun::integrate_adaptive(f, k, k + 1, opts).value;
    for (int k = 0; k < 40; ++k) above += specfun::integrate_adaptive(f, k, k + 1, opts).value;
    CHECK(std::abs(below + above - 1.0) < 1e-7);
    CHECK(below == Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(type2_ratio_pdf(0.0, p), DomainError);
    CHECK_THROWS_AS(type2_ratio_pdf(1.0, Ubbs1Params{0.5, 0.5, 1, 1, 0.2}), ParameterError);
}

TEST_CASE("cdf") {
    const Ubbs1Params sym{0.8, 1.3, 1.0, 1.0, -0.4};
    CHECK(cdf(0.5, sym) == Approx(0.5).epsilon(1e-9));

    const Ubbs1Params p{0.5, 0.5, 1.0, 1.0, 0.25};
    for (double z : {0.3, 0.5, 0.7}) {
        const double h = 1e-5;
        const double fd = (cdf(z + h, p) - cdf(z - h, p)) / (2 * h);
        CHECK(fd == Approx(pdf(z, p)).epsilon(1e-5));
    }
    // Against the density integrated from 0.
    const Ubbs1Params q{1.6, 0.7, 1.1, 0.9, 0.6};
    for (double z : {0.1, 0.4, 0.9}) {
        auto f = [&](double t) { return pdf(t, q); };
        const double direct = specfun::integrate_adaptive(f, 1e-300, z, specfun::IntegrationOptions{1e-13, 0, 10000}).value;
        CHECK(cdf(z, q) == Approx(direct).epsilon(1e-9));
    }
    double prev = 0.0;
    for (double z = 0.001; z < 1.0; z += 0.001) {
        const auto t = cdf_tails(z, q);
        CHECK(t.lower >= prev);
        CHECK(std::abs(t.lower + t.upper - 1.0) < 1e-12);
        prev = t.lower;
    }
    CHECK(cdf(1e-9, q) < 1e-6);
    CHECK(survival(1.0 - 1e-9, q) < 1e-6);
    CHECK_THROWS_AS(cdf(1.0, q), DomainError);
}

TEST_CASE("cdf falls back to adaptive quadrature when Gauss-Hermite disagrees") {
    // Strong negative correlation makes the erf argument a near-step in w.
    const Ubbs1Params p{1.0, 1.0, 1.0, 1.0, -0.9};
    for (double z : {0.2, 0.45, 0.8}) {
        auto f = [&](double t) { return pdf(t, p); };
        const double direct = specfun::integrate_adaptive(f, 1e-300, z, specfun::IntegrationOptions{1e-13, 0, 10000}).value;
        CHECK(cdf(z, p) == Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("quantile") {
    const Ubbs1Params sym{0.6, 0.9, 2.0, 2.0, 0.3};
    CHECK(std::abs(quantile(0.5, sym) - 0.5) < 1e-8);
    const Ubbs1Params p{1.6, 0.7, 1.1, 0.9, 0.6};
    for (double q : {0.05, 0.5, 0.95, 1e-6, 1.0 - 1e-6}) CHECK(std::abs(cdf(quantile(q, p), p) - q) < 1e-10);
    double prev = 0.0;
    for (int i = 1; i <= 99; ++i) {
        const double z = quantile(i / 100.0, p);
        CHECK(z > prev);
        prev = z;
    }
    CHECK_THROWS_AS(quantile(0.0, p), DomainError);
    CHECK_THROWS_AS(quantile(1.0, p), DomainError);
}

TEST_CASE("moments") {
    const Ubbs1Params sym{1.4, 0.6, 1.7, 1.7, 0.45};
    CHECK(std::abs(moment(1, sym) - 0.5) < 1e-6);

    // Survival-function route against direct integration of z^n f(z).
    const Ubbs1Params p{1.0, 1.0, 1.0, 1.0, 0.5};
    for (int n : {1, 2, 3, 5, 10})
        CHECK(moment(n, p) == Approx(oracle::expect([n](double z) { return std::pow(z, n); }, p)).epsilon(1e-7));

    // Frozen Monte Carlo means of Z^n from 4e6 bivariate-BS draws (standard error below 2e-4).
    CHECK(moment(2, p) == Approx(0.28834).epsilon(1e-3));
    CHECK(moment(3, p) == Approx(0.18249).epsilon(2e-3));
    CHECK(moment(5, p) == Approx(0.08719).epsilon(3e-3));
    CHECK(moment(10, p) == Approx(0.023457).epsilon(1e-2));
    CHECK(moment(4, Ubbs1Params{1, 1, 1, 1, -0.9}) == Approx(0.21431).epsilon(2e-3));

    double prev = 1.0;
    for (int n = 1; n <= 10; ++n) {
        const double m = moment(n, p);
        CHECK(m < prev);
        CHECK(m > 0.0);
        prev = m;
    }
    CHECK_THROWS_AS(moment(0, p), DomainError);
}

TEST_CASE("mgf") {
    const Ubbs1Params p{1.0, 1.0, 1.0, 1.0, 0.0};
    CHECK(mgf(0.0, p) == 1.0);
    const double h = 1e-4;
    CHECK((mgf(h, p, 10) - mgf(-h, p, 10)) / (2 * h) == Approx(moment(1, p)).epsilon(1e-7));
    for (double t : {1.0, -2.5, 5.0})
        CHECK(std::abs(mgf(t, p) - oracle::expect([t](double z) { return std::exp(t * z); }, p)) < 1e-6);
    CHECK_THROWS_AS(mgf(51.0, p), DomainError);
    CHECK_THROWS_AS(mgf(1.0, p, 0), DomainError);
}

TEST_CASE("stress-strength") {
    for (const auto& p : {Ubbs1Params{0.3, 1.7, 2.0, 2.0, 0.8}, Ubbs1Params{1.0, 1.0, 0.5, 0.5, -0.95}})
        CHECK(std::abs(stress_strength(p) - 0.5) < 1e-9);
    std::mt19937_64 gen(99);
    for (int i = 0; i < 10; ++i) {
        const auto p = random_params(gen);
        const double r = stress_strength(p);
        CHECK(std::abs(r + stress_strength(p.swapped()) - 1.0) < 1e-9);
        CHECK(std::abs(r - survival(0.5, p)) < 1e-10);
    }
}

TEST_CASE("modality") {
    CHECK(classify_modality({0.5, 0.7, 1.1, 0.9, 0.6}).kind == ModalityKind::unimodal);
    // The density at alpha1 = 1.6 has a single mode (checked against the integral form and
    // a Monte Carlo histogram); the second mode appears near alpha1 = 1.68.
    CHECK(classify_modality({1.6, 0.7, 1.1, 0.9, 0.6}).kind == ModalityKind::unimodal);
    const auto bi = classify_modality({2.0, 0.7, 1.1, 0.9, 0.6});
    CHECK(bi.kind == ModalityKind::bimodal);
    REQUIRE(bi.critical_points.size() == 3);
    CHECK(bi.critical_points[0].kind == CriticalKind::max);
    CHECK(bi.critical_points[1].kind == CriticalKind::min);
    CHECK(bi.critical_points[2].kind == CriticalKind::max);

    const auto sym = classify_modality({2.5, 2.5, 1.0, 1.0, 0.0});
    REQUIRE(sym.modes().size() == 2);
    CHECK(std::abs(sym.modes()[0] + sym.modes()[1] - 1.0) < 1.0 / 2002);
    CHECK(sym.critical_points[1].z == Approx(0.5).epsilon(1e-8));

    // Three maxima occur here; more than three critical points is reported, not hidden.
    CHECK_THROWS_AS(classify_modality({2.0, 2.0, 1.0, 1.0, 0.5}), NumericalAnomaly);
    CHECK_THROWS_AS(classify_modality({1, 1, 1, 1, 0}, 100), DomainError);
}
