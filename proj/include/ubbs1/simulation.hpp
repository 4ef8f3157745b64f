#pragma once

// Monte Carlo benchmark of the estimators: relative bias and RMSE per parameter.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "ubbs1/estimation.hpp"

namespace ubbs1 {

struct Scenario {
    Ubbs1Params true_params{0.5, 0.5, 1.0, 1.0, 0.25};
    Eigen::Index n = 100;
    int replications = 300;
    std::vector<Method> methods{Method::mle, Method::mps};
    std::uint64_t master_seed = 1;
    OptimizerConfig optimizer;
    unsigned threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
};

struct ErrorSummary {
    double rb = 0.0;    ///< mean |(estimate - truth) / truth|
    double rmse = 0.0;  ///< sqrt(mean (estimate - truth)^2)
};

ErrorSummary summarize_errors(std::span<const double> estimates, double truth);

struct MethodReport {
    Method method = Method::mle;
    std::array<ErrorSummary, 5> params{};
    int n_converged = 0;
    int n_failed = 0;
    std::vector<ParamVector> estimates;  ///< converged replications, in replication order
};

struct SimulationReport {
    Scenario scenario;
    std::vector<MethodReport> methods;

    const MethodReport& at(Method m) const;
};

/// Replication i draws its sample from Rng::stream(master_seed, i), so the
/// report does not depend on the thread count or execution order.
SimulationReport run_scenario(const Scenario& sc);

/// Cross product of n and rho over `base`; cell k uses a seed derived from
/// (base.master_seed, k). Cells are ordered by n, then rho.
std::vector<SimulationReport> run_grid(const Scenario& base, const std::vector<Eigen::Index>& n_values,
                                       const std::vector<double>& rho_values);

/// Header `method,param,n,rho,rb,rmse,n_converged,n_failed`.
void write_report_csv(std::ostream& out, const std::vector<SimulationReport>& reports);

struct GridConfig {
    Scenario base;
    std::vector<Eigen::Index> n_values;
    std::vector<double> rho_values;
};

/// Keys (all optional): true_params [a1,a2,b1,b2,rho], n, n_values, rho_values,
/// replications, methods, seed, threads, starts, nm_max_evaluations.
/// Defaults reproduce the symmetric design (0.5, 0.5, 1, 1) over n in
/// {100, 200, 400, 800} and rho in {0.10, 0.25, 0.5, 0.75} with 300 replications.
GridConfig parse_grid_config(const nlohmann::json& j);

}  // namespace ubbs1
