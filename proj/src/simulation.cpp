#include "ubbs1/simulation.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <thread>

#include "ubbs1/sampling.hpp"

namespace ubbs1 {

namespace {

struct Replication {
    std::vector<std::optional<ParamVector>> by_method;
};

Replication run_replication(const Scenario& sc, int index) {
    Rng rng = Rng::stream(sc.master_seed, static_cast<std::uint64_t>(index));
    const UnitSample sample = sample_ubbs1(sc.n, sc.true_params, rng);
    OptimizerConfig config = sc.optimizer;
    // Only beta2 / beta1 is identifiable; anchor the geometric mean at the truth.
    config.beta_scale = std::sqrt(sc.true_params.beta1 * sc.true_params.beta2);
    Replication out;
    for (Method m : sc.methods) {
        try {
            out.by_method.emplace_back(fit(sample, m, std::nullopt, config).params.to_vector());
        } catch (const ConvergenceError&) {
            out.by_method.emplace_back(std::nullopt);
        }
    }
    return out;
}

}  // namespace

void Scenario::validate() const {
    true_params.validate();
    if (n < 6) throw InsufficientData("Scenario: n must be at least 6");
    if (replications < 1) throw std::invalid_argument("Scenario: replications must be at least 1");
    if (methods.empty()) throw std::invalid_argument("Scenario: no estimation method selected");
}

ErrorSummary summarize_errors(std::span<const double> estimates, double truth) {
    if (estimates.empty()) return {std::nan(""), std::nan("")};
    double abs_rel = 0.0, sq = 0.0;
    for (double e : estimates) {
        abs_rel += std::abs((e - truth) / truth);
        sq += (e - truth) * (e - truth);
    }
    const double n = static_cast<double>(estimates.size());
    return {abs_rel / n, std::sqrt(sq / n)};
}

const MethodReport& SimulationReport::at(Method m) const {
    for (const auto& r : methods)
        if (r.method == m) return r;
    throw std::out_of_range("SimulationReport: method not part of the scenario");
}

SimulationReport run_scenario(const Scenario& sc) {
    sc.validate();
    std::vector<Replication> results(static_cast<std::size_t>(sc.replications));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < sc.replications; i = next++) results[static_cast<std::size_t>(i)] = run_replication(sc, i);
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned threads = std::min<unsigned>(sc.threads == 0 ? hw : sc.threads, static_cast<unsigned>(sc.replications));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SimulationReport report{sc, {}};
    const ParamVector truth = sc.true_params.to_vector();
    bool any = false;
    for (std::size_t k = 0; k < sc.methods.size(); ++k) {
        MethodReport mr;
        mr.method = sc.methods[k];
        for (const auto& rep : results) {
            if (rep.by_method[k]) {
                mr.estimates.push_back(*rep.by_method[k]);
                ++mr.n_converged;
            } else {
                ++mr.n_failed;
            }
        }
        any = any || mr.n_converged > 0;
        for (int j = 0; j < 5; ++j) {
            std::vector<double> column;
            column.reserve(mr.estimates.size());
            for (const auto& e : mr.estimates) column.push_back(e(j));
            mr.params[static_cast<std::size_t>(j)] = summarize_errors(column, truth(j));
        }
        report.methods.push_back(std::move(mr));
    }
    if (!any) throw ConvergenceError("run_scenario: every replication failed for every method");
    return report;
}

std::vector<SimulationReport> run_grid(const Scenario& base, const std::vector<Eigen::Index>& n_values,
                                       const std::vector<double>& rho_values) {
    std::vector<SimulationReport> out;
    std::uint64_t cell = 0;
    for (Eigen::Index n : n_values) {
        for (double rho : rho_values) {
            Scenario sc = base;
            sc.n = n;
            sc.true_params.rho = rho;
            sc.master_seed = Rng::stream(base.master_seed, cell++).next();
            out.push_back(run_scenario(sc));
        }
    }
    return out;
}

void write_report_csv(std::ostream& out, const std::vector<SimulationReport>& reports) {
    out << "method,param,n,rho,rb,rmse,n_converged,n_failed\n";
    const auto old_precision = out.precision(10);
    for (const auto& rep : reports)
        for (const auto& mr : rep.methods)
            for (std::size_t j = 0; j < 5; ++j)
                out << to_string(mr.method) << ',' << kParamNames[j] << ',' << rep.scenario.n << ','
                    << rep.scenario.true_params.rho << ',' << mr.params[j].rb << ',' << mr.params[j].rmse << ','
                    << mr.n_converged << ',' << mr.n_failed << '\n';
    out.precision(old_precision);
}

GridConfig parse_grid_config(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("simulation config must be a JSON object");
    GridConfig g;
    g.base.true_params = {0.5, 0.5, 1.0, 1.0, 0.25};
    g.n_values = {100, 200, 400, 800};
    g.rho_values = {0.10, 0.25, 0.5, 0.75};
    try {
        if (j.contains("true_params")) {
            const auto v = j.at("true_params").get<std::vector<double>>();
            if (v.size() != 5) throw std::invalid_argument("true_params needs 5 values");
            g.base.true_params = {v[0], v[1], v[2], v[3], v[4]};
        }
        if (j.contains("n")) g.n_values = {j.at("n").get<Eigen::Index>()};
        if (j.contains("n_values")) g.n_values = j.at("n_values").get<std::vector<Eigen::Index>>();
        if (j.contains("rho_values")) g.rho_values = j.at("rho_values").get<std::vector<double>>();
        else if (j.contains("true_params")) g.rho_values = {g.base.true_params.rho};
        if (j.contains("replications")) g.base.replications = j.at("replications").get<int>();
        if (j.contains("methods")) {
            g.base.methods.clear();
            for (const auto& m : j.at("methods")) g.base.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("seed")) g.base.master_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) g.base.threads = j.at("threads").get<unsigned>();
        if (j.contains("starts")) g.base.optimizer.starts = j.at("starts").get<int>();
        if (j.contains("nm_max_evaluations")) g.base.optimizer.nm_max_evaluations = j.at("nm_max_evaluations").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed simulation config: ") + e.what());
    }
    if (g.n_values.empty() || g.rho_values.empty()) throw std::invalid_argument("n_values and rho_values must be non-empty");
    for (double rho : g.rho_values) {
        Ubbs1Params p = g.base.true_params;
        p.rho = rho;
        p.validate();
    }
    for (auto n : g.n_values) {
        Scenario sc = g.base;
        sc.n = n;
        sc.validate();
    }
    return g;
}

}  // namespace ubbs1
