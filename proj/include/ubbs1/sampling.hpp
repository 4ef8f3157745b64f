#pragma once

// Seedable random generation and the ratio sampler.

#include <Eigen/Core>

#include <cstdint>
#include <limits>

#include "ubbs1/bivariate_bs.hpp"
#include "ubbs1/params.hpp"
#include "ubbs1/sample.hpp"

namespace ubbs1 {

/// xoshiro256** seeded through splitmix64. Not thread-safe: give each thread
/// (or each Monte Carlo replication) its own stream via Rng::stream.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    /// Independent generator for replication `index` of a run seeded with `master`.
    /// Depends only on (master, index), so results do not depend on scheduling.
    static Rng stream(std::uint64_t master, std::uint64_t index);

    std::uint64_t next();
    result_type operator()() { return next(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Standard normal by inversion of the normal CDF (Wichura's AS 241).
    double normal();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

/// Inverse standard normal CDF, relative accuracy about 1e-16.
double normal_quantile(double p);

/// n x 2 matrix of standard bivariate normal pairs with correlation rho,
/// built as W * [[1, rho], [0, sqrt(1 - rho^2)]] from independent normals W.
Eigen::MatrixX2d sample_bivariate_normal(Eigen::Index n, double rho, Rng& rng);

/// T = beta (alpha x / 2 + sqrt(alpha^2 x^2 / 4 + 1))^2.
double normal_to_bs(double x, const BsParamsd& p);

/// n x 2 matrix of bivariate BS pairs (T1 ~ BS(alpha1, beta1), T2 ~ BS(alpha2, beta2)).
Eigen::MatrixX2d sample_bivariate_bs(Eigen::Index n, const BivBsParamsd& p, Rng& rng);

/// Which component goes in the numerator of the ratio.
enum class RatioConvention {
    density,  ///< Z = T2 / (T1 + T2), the law whose density is pdf()
    listing,  ///< Z = T1 / (T1 + T2), the order of the step-by-step recipe
};

UnitSample sample_ubbs1(Eigen::Index n, const Ubbs1Params& p, Rng& rng,
                        RatioConvention convention = RatioConvention::density);

}  // namespace ubbs1
