#include "ubbs1/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ubbs1::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Eigen::VectorXd& x, int& counter) {
    ++counter;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
    const Eigen::Index dim = x0.size();
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(dim + 1), x0);
    for (Eigen::Index i = 0; i < dim; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += opts.initial_step;

    MinimizeResult res;
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = safe_eval(f, simplex[i], res.evaluations);

    std::vector<std::size_t> order(simplex.size());
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double size = 0.0;
        for (const auto& v : simplex) size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
        const double spread = values[worst] - values[best];
        if (std::isfinite(spread) && spread <= opts.f_tol * (std::abs(values[best]) + 1e-12) && size <= opts.x_tol) {
            res.converged = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) break;
        ++res.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (std::size_t i : order)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(dim);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double f_r = safe_eval(f, reflected, res.evaluations);
        if (f_r < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double f_e = safe_eval(f, expanded, res.evaluations);
            if (f_e < f_r) {
                simplex[worst] = expanded;
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if (f_r < values[second]) {
            simplex[worst] = reflected;
            values[worst] = f_r;
            continue;
        }
        const bool outside = f_r < values[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double f_c = safe_eval(f, contracted, res.evaluations);
        if (f_c < (outside ? f_r : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_c;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = safe_eval(f, simplex[i], res.evaluations);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    res.x = simplex[best];
    res.f = values[best];
    return res;
}

MinimizeResult bfgs(const ObjectiveWithGradient& f, const Eigen::VectorXd& x0, const BfgsOptions& opts) {
    const Eigen::Index dim = x0.size();
    MinimizeResult res;
    Eigen::VectorXd x = x0, g(dim);
    double fx = f(x, g);
    ++res.evaluations;
    if (!std::isfinite(fx) || !g.allFinite()) {
        res.x = x;
        res.f = kInf;
        res.gradient_norm = kInf;
        return res;
    }
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd g_new(dim);

    for (; res.iterations < opts.max_iterations; ++res.iterations) {
        if (g.cwiseAbs().maxCoeff() < opts.grad_tol) break;
        Eigen::VectorXd dir = -h_inv * g;
        if (g.dot(dir) >= 0.0) {
            h_inv.setIdentity();
            dir = -g;
        }
        // Armijo backtracking
        double step = 1.0, f_new = kInf;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            x_new = x + step * dir;
            f_new = f(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && g_new.allFinite() && f_new <= fx + 1e-4 * step * g.dot(dir)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (h_inv.isIdentity()) break;
            h_inv.setIdentity();
            continue;
        }
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        res.last_rel_change = std::abs(fx - f_new) / std::max(std::abs(f_new), 1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(dim, dim);
            h_inv = (ident - rho * s * y.transpose()) * h_inv * (ident - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        if (res.last_rel_change < opts.rel_tol) {
            ++res.iterations;
            break;
        }
    }
    res.x = x;
    res.f = fx;
    res.gradient_norm = g.cwiseAbs().maxCoeff();
    res.converged = res.gradient_norm < opts.grad_tol;
    return res;
}

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp(i) = x(i) + h;
        const double fp = f(xp);
        xp(i) = x(i) - h;
        const double fm = f(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace ubbs1::optim
