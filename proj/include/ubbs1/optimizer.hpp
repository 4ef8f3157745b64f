#pragma once

// Small unconstrained minimisers used by the fitting pipeline.

#include <Eigen/Core>

#include <functional>

namespace ubbs1::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Returns f(x) and writes the gradient into `grad`.
using ObjectiveWithGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd& grad)>;

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    double gradient_norm = 0.0;     ///< infinity norm; 0 when no gradient was used
    double last_rel_change = 1.0;   ///< |f_prev - f| / max(|f|, 1) of the last accepted step
    bool converged = false;
};

struct NelderMeadOptions {
    int max_evaluations = 600;
    double f_tol = 1e-9;
    double x_tol = 1e-7;
    double initial_step = 0.3;
};

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2). Non-finite
/// objective values are treated as +infinity.
MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& opts = {});

struct BfgsOptions {
    int max_iterations = 200;
    double grad_tol = 1e-9;   ///< stop once the infinity norm of the gradient drops below this
    double rel_tol = 1e-12;   ///< stop once a step changes f by less than this (relative)
};

/// BFGS on the inverse Hessian with Armijo backtracking. The update is skipped
/// when the curvature condition fails. `converged` reports the gradient test only.
MinimizeResult bfgs(const ObjectiveWithGradient& f, const Eigen::VectorXd& x0, const BfgsOptions& opts = {});

/// Central-difference gradient with a fixed step.
Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double h);

}  // namespace ubbs1::optim
