#include "ubbs1/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace ubbs1 {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

template <std::size_t N>
double horner(const double (&c)[N], double x) {
    double acc = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
    return acc;
}

constexpr double kA[] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                         1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                         3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
                         2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                         5.2264952788528545610e+3};
constexpr double kC[] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                         3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                         2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[] = {1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
                         1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                         1.05075007164441684324e-9};
constexpr double kE[] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                         2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                         2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[] = {1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
                         7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                         2.04426310338993978564e-15};

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t state = master;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (index * 0xD1B54A32D192ED03ULL);
    return Rng(splitmix64(state));
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double Rng::normal() { return normal_quantile(uniform()); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(kA, r) / horner(kB, r);
    }
    double r = std::sqrt(-std::log(std::min(p, 1.0 - p)));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = horner(kC, r) / horner(kD, r);
    } else {
        r -= 5.0;
        value = horner(kE, r) / horner(kF, r);
    }
    return q < 0.0 ? -value : value;
}

Eigen::MatrixX2d sample_bivariate_normal(Eigen::Index n, double rho, Rng& rng) {
    if (n < 1) throw DomainError("sample_bivariate_normal: n must be at least 1");
    if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("sample_bivariate_normal: rho must lie in (-1, 1)");
    Eigen::MatrixX2d w(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, 0) = rng.normal();
        w(i, 1) = rng.normal();
    }
    Eigen::Matrix2d q;
    q << 1.0, rho, 0.0, std::sqrt(1.0 - rho * rho);
    return w * q;
}

double normal_to_bs(double x, const BsParamsd& p) {
    const double h = 0.5 * p.alpha * x;
    const double root = std::sqrt(h * h + 1.0);
    const double base = h >= 0.0 ? h + root : 1.0 / (root - h);
    return p.beta * base * base;
}

Eigen::MatrixX2d sample_bivariate_bs(Eigen::Index n, const BivBsParamsd& p, Rng& rng) {
    p.validate();
    Eigen::MatrixX2d t = sample_bivariate_normal(n, p.rho, rng);
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i, 0) = normal_to_bs(t(i, 0), p.x);
        t(i, 1) = normal_to_bs(t(i, 1), p.y);
    }
    return t;
}

UnitSample sample_ubbs1(Eigen::Index n, const Ubbs1Params& p, Rng& rng, RatioConvention convention) {
    p.validate();
    const Eigen::MatrixX2d t = sample_bivariate_bs(n, p.bivariate(), rng);
    const int numerator = convention == RatioConvention::density ? 1 : 0;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        // Both components are positive; the clamp only guards against a ratio rounding to 0 or 1.
        const double ratio = t(i, numerator) / (t(i, 0) + t(i, 1));
        z[static_cast<std::size_t>(i)] =
            std::clamp(ratio, std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon() / 2);
    }
    return UnitSample(std::move(z), "sample_ubbs1 seed=" + std::to_string(rng.seed()) + " params=" + p.to_string());
}

}  // namespace ubbs1
