#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "ubbs1/bivariate_bs.hpp"
#include "ubbs1/errors.hpp"

namespace ubbs1 {

using ParamVector = Eigen::Matrix<double, 5, 1>;

inline constexpr std::array<std::string_view, 5> kParamNames = {"alpha1", "alpha2", "beta1", "beta2", "rho"};

/// (alpha1, alpha2, beta1, beta2, rho): X ~ BS(alpha1, beta1), Y ~ BS(alpha2, beta2),
/// correlation rho on the normal scale, Z = Y / (X + Y).
struct Ubbs1Params {
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double rho = 0.0;

    void validate() const {
        const bool ok = std::isfinite(alpha1) && std::isfinite(alpha2) && std::isfinite(beta1) &&
                        std::isfinite(beta2) && alpha1 > 0.0 && alpha2 > 0.0 && beta1 > 0.0 && beta2 > 0.0 &&
                        rho > -1.0 && rho < 1.0;
        if (!ok) throw ParameterError("invalid UBBS1 parameters " + to_string());
    }

    ParamVector to_vector() const { return (ParamVector() << alpha1, alpha2, beta1, beta2, rho).finished(); }

    static Ubbs1Params from_vector(const Eigen::Ref<const ParamVector>& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

    BivBsParamsd bivariate() const { return {{alpha1, beta1}, {alpha2, beta2}, rho}; }

    /// Parameters of 1 - Z, i.e. the roles of X and Y exchanged.
    Ubbs1Params swapped() const { return {alpha2, alpha1, beta2, beta1, rho}; }

    std::string to_string() const;

    bool operator==(const Ubbs1Params&) const = default;
};

/// Parses "a1,a2,b1,b2,rho" and validates the result.
Ubbs1Params parse_params(std::string_view text);

}  // namespace ubbs1
