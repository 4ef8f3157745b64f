#pragma once

// Likelihood, spacings objective and the fitting pipeline.

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ubbs1/distribution.hpp"
#include "ubbs1/params.hpp"
#include "ubbs1/sample.hpp"

namespace ubbs1 {

enum class Method { mle, mps };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

/// log for the four positive parameters, atanh for rho.
struct ParamTransform {
    static ParamVector forward(const Ubbs1Params& p);
    /// Always yields valid parameters; rho is kept at least 1e-10 away from +-1.
    static Ubbs1Params backward(const Eigen::Ref<const ParamVector>& x);
};

/// Sum of the per-observation log-kernel terms (the density without its
/// log((s+1)^2/s) Jacobian, which does not depend on the parameters).
double log_likelihood(const UnitSample& sample, const Ubbs1Params& p);

/// Analytic partials of log_likelihood in the order (alpha1, alpha2, beta1, beta2, rho).
ParamVector log_likelihood_gradient(const UnitSample& sample, const Ubbs1Params& p);

struct Spacings {
    std::vector<double> delta;   ///< n + 1 values
    int floored = 0;             ///< spacings raised to the 1e-300 floor (ties or rounding)
};

Spacings spacings(const UnitSample& sample, const Ubbs1Params& p, const CdfOptions& opts = {});

/// H = (1 / (n + 1)) sum log(delta_i).
double mps_objective(const UnitSample& sample, const Ubbs1Params& p, const CdfOptions& opts = {});

struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};

InformationCriteria information_criteria(double loglik, int k, Eigen::Index n);

/// Sum of log_pdf over the sample. Unlike log_likelihood this keeps the Jacobian,
/// so it is on the same footing as the beta baseline's log-likelihood.
double log_density(const UnitSample& sample, const Ubbs1Params& p);

struct OptimizerConfig {
    int starts = 8;
    int nm_max_evaluations = 400;
    int bfgs_max_iterations = 200;
    double grad_tol = 1e-6;      ///< convergence on the gradient of the per-observation objective
    double rel_tol = 1e-10;      ///< MPS may also converge on relative objective change
    double fd_step = 1e-5;       ///< central-difference step for the MPS gradient
    /// The law of Z depends on (beta1, beta2) only through beta2 / beta1. The fit
    /// pins sqrt(beta1 * beta2) to the init's value, or to this when no init is given.
    double beta_scale = 1.0;
    CdfOptions cdf{64, false, 1e-9};
};

struct FitResult {
    Ubbs1Params params;
    Method method = Method::mle;
    double objective = 0.0;      ///< l for mle, H for mps
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;  ///< infinity norm of the transformed-scale gradient of the per-observation objective
    int starts_converged = 0;
    std::vector<std::string> warnings;
};

/// Multi-start Nelder-Mead followed by quasi-Newton polish. Throws
/// InsufficientData for n < 6 and ConvergenceError when no start converges.
FitResult fit(const UnitSample& sample, Method method, const std::optional<Ubbs1Params>& init = std::nullopt,
              const OptimizerConfig& config = {});

struct BetaFitResult {
    double a = 1.0;
    double b = 1.0;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    int iterations = 0;
};

double beta_log_likelihood(const UnitSample& sample, double a, double b);

/// Two-parameter Beta maximum likelihood (moment start, Newton on the digamma equations).
BetaFitResult fit_beta_baseline(const UnitSample& sample);

}  // namespace ubbs1
