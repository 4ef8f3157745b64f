// Command-line front end for the ubbs1 library.
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure. Results go to
// stdout (or --output); diagnostics go to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "ubbs1/distribution.hpp"
#include "ubbs1/estimation.hpp"
#include "ubbs1/io.hpp"
#include "ubbs1/sampling.hpp"
#include "ubbs1/simulation.hpp"

namespace {

using namespace ubbs1;

/// Bad command-line arguments detected after CLI11 parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string params;
    std::string grid;
    std::string input;
    std::string output;
    std::string method = "mle";
    std::string init;
    std::string config;
    std::string models = "ubbs1_mle,ubbs1_mps,beta";
    std::string format = "text";
    std::string convention = "density";
    std::optional<std::uint64_t> seed;
    long n = 0;
    int order = 0;
    int max_order = 10;
    int replications = 0;
    unsigned threads = 0;
};

Ubbs1Params require_params(const Options& o) {
    if (o.params.empty()) throw UsageError("--params a1,a2,b1,b2,rho is required");
    try {
        return parse_params(o.params);
    } catch (const ParameterError& e) {
        throw UsageError(std::string("--params: ") + e.what());
    }
}

GridSpec require_grid(const Options& o) {
    if (o.grid.empty()) throw UsageError("--grid start:stop:count is required");
    try {
        return parse_grid(o.grid);
    } catch (const InputError& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
}

std::uint64_t require_seed(const Options& o) {
    if (!o.seed) throw UsageError("--seed is required for randomized subcommands");
    return *o.seed;
}

CdfOptions cdf_options(const Options& o) {
    CdfOptions c;
    if (const char* env = std::getenv("UBBS1_QUAD_ORDER")) {
        try {
            c.order = std::stoi(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("UBBS1_QUAD_ORDER is not an integer: '") + env + "'");
        }
    }
    if (o.order > 0) c.order = o.order;
    if (c.order < 2 || c.order > 256) throw UsageError("quadrature order must lie in [2, 256]");
    return c;
}

/// Writes to --output when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

UnitSample load_sample(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
    UnitCsv csv = read_unit_csv(o.input);
    for (const auto& d : csv.diagnostics) std::cerr << "warning: " << d << '\n';
    const std::size_t rejected = csv.rejected_out_of_range + csv.rejected_non_finite;
    if (rejected > 0)
        std::cerr << "rejected " << rejected << " row(s) (" << csv.rejected_out_of_range << " outside (0, 1), "
                  << csv.rejected_non_finite << " non-finite); " << csv.values.size() << " kept\n";
    if (csv.values.empty()) throw InsufficientData("no usable observations in '" + o.input + "'");
    return UnitSample(std::move(csv.values), o.input);
}

void cmd_tabulate(const Options& o, const std::string& what) {
    const Ubbs1Params p = require_params(o);
    const GridSpec g = require_grid(o);
    const CdfOptions c = cdf_options(o);
    Sink sink(o.output);
    auto& out = sink.stream();
    out << (what == "quantile" ? "q" : "z") << ",value\n" << std::setprecision(17);
    for (double x : g.points()) {
        double v;
        if (what == "pdf") v = pdf(x, p);
        else if (what == "cdf") v = cdf(x, p, c);
        else v = quantile(x, p, c);
        out << x << ',' << v << '\n';
    }
}

void cmd_moments(const Options& o) {
    const Ubbs1Params p = require_params(o);
    if (o.max_order < 1) throw UsageError("--max-order must be at least 1");
    const CdfOptions c = cdf_options(o);
    Sink sink(o.output);
    auto& out = sink.stream();
    out << "n,value\n" << std::setprecision(15);
    for (int k = 1; k <= o.max_order; ++k) out << k << ',' << moment(k, p, c) << '\n';
}

void cmd_stress(const Options& o) {
    const Ubbs1Params p = require_params(o);
    Sink sink(o.output);
    sink.stream() << "R\n" << std::setprecision(17) << stress_strength(p, cdf_options(o)) << '\n';
}

void cmd_sample(const Options& o) {
    const Ubbs1Params p = require_params(o);
    if (o.n < 1) throw UsageError("--n must be at least 1");
    const std::uint64_t seed = require_seed(o);
    const auto convention = o.convention == "listing" ? RatioConvention::listing : RatioConvention::density;
    Rng rng(seed);
    const UnitSample s = sample_ubbs1(o.n, p, rng, convention);
    Sink sink(o.output);
    auto& out = sink.stream();
    if (o.format == "csv") out << "z\n";
    out << std::setprecision(17);
    for (double z : s.values()) out << z << '\n';
}

std::optional<Ubbs1Params> optional_init(const Options& o) {
    if (o.init.empty()) return std::nullopt;
    try {
        return parse_params(o.init);
    } catch (const ParameterError& e) {
        throw UsageError(std::string("--init: ") + e.what());
    }
}

void cmd_fit(const Options& o) {
    Method method;
    try {
        method = parse_method(o.method);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto init = optional_init(o);
    const UnitSample sample = load_sample(o);
    OptimizerConfig config;
    config.cdf.order = cdf_options(o).order;
    const FitResult r = fit(sample, method, init, config);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    Sink sink(o.output);
    sink.stream() << std::setprecision(17) << to_json(r).dump(2) << '\n';
}

void cmd_compare(const Options& o) {
    struct Row {
        std::string model;
        double loglik, aic, bic;
    };
    std::vector<std::string> models;
    std::stringstream ss(o.models);
    for (std::string m; std::getline(ss, m, ',');) {
        if (m != "ubbs1_mle" && m != "ubbs1_mps" && m != "beta")
            throw UsageError("--models entries must be ubbs1_mle, ubbs1_mps or beta; got '" + m + "'");
        if (std::find(models.begin(), models.end(), m) == models.end()) models.push_back(m);
    }
    if (models.empty()) throw UsageError("--models is empty");
    const auto init = optional_init(o);
    const UnitSample sample = load_sample(o);
    OptimizerConfig config;
    config.cdf.order = cdf_options(o).order;

    std::vector<Row> rows;
    for (const auto& m : models) {
        if (m == "beta") {
            const auto b = fit_beta_baseline(sample);
            rows.push_back({m, b.loglik, b.aic, b.bic});
        } else {
            // Score on the density of z so the beta row is comparable.
            const auto r = fit(sample, m == "ubbs1_mle" ? Method::mle : Method::mps, init, config);
            const double ll = log_density(sample, r.params);
            const auto ic = information_criteria(ll, 5, sample.n());
            rows.push_back({m, ll, ic.aic, ic.bic});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.aic < b.aic; });
    Sink sink(o.output);
    auto& out = sink.stream();
    out << "model,loglik,aic,bic,best\n" << std::setprecision(12);
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << rows[i].model << ',' << rows[i].loglik << ',' << rows[i].aic << ',' << rows[i].bic << ','
            << (i == 0 ? "*" : "") << '\n';
}

void cmd_simulate(const Options& o) {
    if (o.config.empty()) throw UsageError("--config is required");
    std::ifstream in(o.config);
    if (!in) throw std::runtime_error("cannot open '" + o.config + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("malformed config: ") + e.what());
    }
    GridConfig g = parse_grid_config(j);
    if (o.seed) g.base.master_seed = *o.seed;
    else if (!j.contains("seed")) throw UsageError("a seed is required: pass --seed or set \"seed\" in the config");
    if (o.replications > 0) g.base.replications = o.replications;
    if (o.threads > 0) g.base.threads = o.threads;
    g.base.optimizer.cdf.order = cdf_options(o).order;
    const auto reports = run_grid(g.base, g.n_values, g.rho_values);
    Sink sink(o.output);
    write_report_csv(sink.stream(), reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UBBS1 distribution: density, sampling, estimation and Monte Carlo benchmarks"};
    app.require_subcommand(1);
    Options o;

    auto add_params = [&](CLI::App* c) { c->add_option("--params", o.params, "alpha1,alpha2,beta1,beta2,rho"); };
    auto add_order = [&](CLI::App* c) {
        c->add_option("--order", o.order, "Gauss-Hermite order (default 64 or $UBBS1_QUAD_ORDER)");
    };
    auto add_output = [&](CLI::App* c) { c->add_option("--output", o.output, "output file (default stdout)"); };

    for (const char* name : {"pdf", "cdf", "quantile"}) {
        auto* c = app.add_subcommand(name, std::string("tabulate the ") + name + " on a grid");
        add_params(c);
        c->add_option("--grid", o.grid, "start:stop:count");
        add_order(c);
        add_output(c);
    }
    auto* moments = app.add_subcommand("moments", "raw moments E[Z^k], k = 1..max-order");
    add_params(moments);
    moments->add_option("--max-order", o.max_order, "highest moment order (default 10)");
    add_order(moments);
    add_output(moments);

    auto* stress = app.add_subcommand("stress", "stress-strength probability P(X < Y)");
    add_params(stress);
    add_order(stress);
    add_output(stress);

    auto* sample = app.add_subcommand("sample", "draw random variates");
    add_params(sample);
    sample->add_option("--n", o.n, "number of draws")->required();
    sample->add_option("--seed", o.seed, "random seed")->required();
    sample->add_option("--format", o.format, "text (one z per line) or csv")->check(CLI::IsMember({"text", "csv"}));
    sample->add_option("--convention", o.convention, "density: Z = T2/(T1+T2); listing: Z = T1/(T1+T2)")
        ->check(CLI::IsMember({"density", "listing"}));
    add_output(sample);

    auto* fitc = app.add_subcommand("fit", "estimate parameters from a single-column CSV");
    fitc->add_option("--input", o.input, "CSV file")->required();
    fitc->add_option("--method", o.method, "mle or mps")->check(CLI::IsMember({"mle", "mps"}));
    fitc->add_option("--init", o.init, "optional start a1,a2,b1,b2,rho (also fixes sqrt(b1 b2))");
    add_order(fitc);
    add_output(fitc);

    auto* compare = app.add_subcommand("compare", "rank models by AIC");
    compare->add_option("--input", o.input, "CSV file")->required();
    compare->add_option("--models", o.models, "comma list of ubbs1_mle, ubbs1_mps, beta");
    compare->add_option("--init", o.init, "optional UBBS1 start");
    add_order(compare);
    add_output(compare);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo RB/RMSE study from a JSON config");
    simulate->add_option("--config", o.config, "JSON scenario file")->required();
    simulate->add_option("--seed", o.seed, "master seed (overrides the config)");
    simulate->add_option("--replications", o.replications, "override the replication count");
    simulate->add_option("--threads", o.threads, "worker threads (default: all cores)");
    add_order(simulate);
    add_output(simulate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "pdf" || name == "cdf" || name == "quantile") cmd_tabulate(o, name);
        else if (name == "moments") cmd_moments(o);
        else if (name == "stress") cmd_stress(o);
        else if (name == "sample") cmd_sample(o);
        else if (name == "fit") cmd_fit(o);
        else if (name == "compare") cmd_compare(o);
        else if (name == "simulate") cmd_simulate(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
