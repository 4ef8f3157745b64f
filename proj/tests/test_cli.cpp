#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ubbs1/distribution.hpp"
#include "ubbs1/estimation.hpp"
#include "ubbs1/io.hpp"

namespace fs = std::filesystem;
using namespace ubbs1;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + UBBS1_CLI_PATH + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Run run_stderr(const std::string& args) {
    const std::string cmd = std::string(UBBS1_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::pair<double, double>> parse_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ubbs1_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_values(const std::string& name, const std::vector<double>& values, bool header) {
    const fs::path path = temp_file(name);
    std::ofstream out(path);
    out.precision(17);
    if (header) out << "z\n";
    for (double v : values) out << v << '\n';
    return path;
}

struct Csv {
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        c.rows.push_back(cells);
    }
    return c;
}

}  // namespace

TEST_CASE("pdf, cdf and quantile tables") {
    const auto pdf = run("pdf --params 0.5,0.5,1,1,0 --grid 0.01:0.99:99");
    CHECK(pdf.code == 0);
    const auto rows = parse_table(pdf.out);
    REQUIRE(rows.size() == 99);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].second > 0.0);
        CHECK(std::abs(rows[i].second - rows[98 - i].second) < 1e-10);
    }
    const auto cdf = parse_table(run("cdf --params 1.6,0.7,1.1,0.9,0.6 --grid 0.01:0.99:99").out);
    for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i].second >= cdf[i - 1].second);
    const auto q = run("quantile --params 0.5,0.5,1,1,0.3 --grid 0.5:0.5:1");
    CHECK(q.code == 0);
    CHECK(std::abs(parse_table(q.out).at(0).second - 0.5) < 1e-8);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("pdf --params 0.5,0.5,1,1,0 --grid 0:1:5").code == 2);
    CHECK(run("pdf --params 0.5,0.5,1,1 --grid 0.1:0.9:5").code == 2);
    CHECK(run("pdf --grid 0.1:0.9:5").code == 2);
    CHECK(run("cdf --params 0.5,0.5,1,1,1.2 --grid 0.1:0.9:5").code == 2);
    CHECK(run("sample --params 0.5,0.5,1,1,0 --n 10").code == 2);
    CHECK(run("fit --input x.csv --method ols").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("").code == 2);
    CHECK(run("cdf --params 0.5,0.5,1,1,0 --grid 0.1:0.9:5", "UBBS1_QUAD_ORDER=abc").code == 2);
}

TEST_CASE("quadrature order from the environment") {
    const auto lo = run("cdf --params 1,1,1,1.4,-0.9 --grid 0.3:0.3:1", "UBBS1_QUAD_ORDER=4");
    const auto hi = run("cdf --params 1,1,1,1.4,-0.9 --grid 0.3:0.3:1");
    const auto flag = run("cdf --params 1,1,1,1.4,-0.9 --grid 0.3:0.3:1 --order 4", "UBBS1_QUAD_ORDER=64");
    CHECK(lo.code == 0);
    CHECK(lo.out == flag.out);
    // The order is self-checked against its double, so a coarse rule still lands on the same value.
    CHECK(std::abs(parse_table(lo.out).at(0).second - parse_table(hi.out).at(0).second) < 1e-9);
    CHECK(run("cdf --params 1,1,1,1.4,-0.9 --grid 0.3:0.3:1", "UBBS1_QUAD_ORDER=1").code == 2);
    CHECK(run("cdf --params 1,1,1,1.4,-0.9 --grid 0.3:0.3:1 --order 1000").code == 2);
}

TEST_CASE("moments and stress") {
    const auto m = run("moments --params 1,1,1,1,0 --max-order 3");
    CHECK(m.code == 0);
    const auto rows = parse_table(m.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[0].second - 0.5) < 1e-6);
    const auto r = run("stress --params 0.4,1.3,2,2,0.5");
    CHECK(r.code == 0);
    CHECK(std::abs(std::stod(r.out.substr(r.out.find('\n') + 1)) - 0.5) < 1e-9);
}

TEST_CASE("sample output is reproducible") {
    const auto a = run("sample --params 1.6,0.7,1.1,0.9,0.6 --n 20 --seed 5");
    const auto b = run("sample --params 1.6,0.7,1.1,0.9,0.6 --n 20 --seed 5");
    const auto c = run("sample --params 1.6,0.7,1.1,0.9,0.6 --n 20 --seed 5 --format csv");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(c.out == "z\n" + a.out);
    std::istringstream in(a.out);
    int lines = 0;
    for (std::string l; std::getline(in, l); ++lines) {
        const double z = std::stod(l);
        CHECK((z > 0.0 && z < 1.0));
    }
    CHECK(lines == 20);
}

TEST_CASE("fit validation paths") {
    CHECK(run("fit --input " + write_values("three.csv", {0.2, 0.5, 0.6}, true).string()).code == 1);
    const auto path = write_values("rejects.csv", {0.5, -0.1, 0.7}, false);
    const auto err = run_stderr("fit --input " + path.string());
    CHECK(err.code == 1);
    CHECK(err.out.find("rejected 1 row") != std::string::npos);
    CHECK(run("fit --input /nonexistent.csv").code == 1);
}

TEST_CASE("fit recovers the income-consumption point estimate") {
    const Ubbs1Params truth{0.275, 0.274, 1.041, 1.331, 0.149};
    const auto path = temp_file("recovery.csv");
    REQUIRE(run("sample --params 0.275,0.274,1.041,1.331,0.149 --n 7957 --seed 1 --format csv --output " +
                path.string()).code == 0);
    const auto r = run("fit --method mle --input " + path.string());
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* key : {"alpha1", "alpha2", "beta1", "beta2", "rho", "method", "loglik", "aic", "bic", "converged", "iterations"})
        CHECK(j.contains(key));
    CHECK(j["converged"] == true);
    const Ubbs1Params est{j["alpha1"], j["alpha2"], j["beta1"], j["beta2"], j["rho"]};
    CAPTURE(est.to_string());

    // With small shapes log(Y/X) is close to normal, so alpha1, alpha2 and rho lie on a
    // flat ridge and are not recovered one by one. Check what the data pin down instead.
    const auto sample = read_unit_csv(path.string()).values;
    CHECK(double(j["loglik"]) >= log_likelihood(UnitSample(sample), truth) - 1e-6);
    double gap = 0.0;
    for (int i = 1; i < 100; ++i) gap = std::max(gap, std::abs(cdf(i / 100.0, est) - cdf(i / 100.0, truth)));
    CHECK(gap < 0.01);
    auto rb = [](double e, double t) { return std::abs((e - t) / t); };
    CHECK(rb(est.beta2 / est.beta1, 1.331 / 1.041) < 0.1);
}

TEST_CASE("compare ranks models by AIC") {
    const auto ubbs = temp_file("ubbs.csv");
    REQUIRE(run("sample --params 1.6,0.7,1.1,0.9,0.6 --n 2000 --seed 8 --output " + ubbs.string()).code == 0);
    const auto res = run("compare --models ubbs1_mle,beta --input " + ubbs.string());
    REQUIRE(res.code == 0);
    const auto csv = parse_csv(res.out);
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[0] == std::vector<std::string>{"model", "loglik", "aic", "bic", "best"});
    CHECK(csv.rows[1][0] == "ubbs1_mle");
    CHECK(csv.rows[1][4] == "*");
    CHECK(std::stod(csv.rows[1][3]) < std::stod(csv.rows[2][3]));

    std::mt19937_64 gen(4);
    std::gamma_distribution<double> ga(7.5, 1.0), gb(6.4, 1.0);
    std::vector<double> z(2000);
    for (auto& v : z) {
        const double x = ga(gen), y = gb(gen);
        v = x / (x + y);
    }
    const auto bpath = write_values("beta.csv", z, true);
    const auto bres = run("compare --models beta,ubbs1_mle --input " + bpath.string());
    REQUIRE(bres.code == 0);
    const auto bcsv = parse_csv(bres.out);
    double beta_aic = 0.0, best = std::stod(bcsv.rows[1][2]);
    for (std::size_t i = 1; i < bcsv.rows.size(); ++i)
        if (bcsv.rows[i][0] == "beta") beta_aic = std::stod(bcsv.rows[i][2]);
    CHECK(beta_aic - best < 4.0);

    const auto single = parse_csv(run("compare --models beta --input " + bpath.string()).out);
    REQUIRE(single.rows.size() == 2);
    CHECK(single.rows[1][4] == "*");
    CHECK(run("compare --models beta,gamma --input " + bpath.string()).code == 2);
}

TEST_CASE("simulate smoke run") {
    const auto cfg = temp_file("sim.json");
    std::ofstream(cfg) << R"({"true_params":[0.5,0.5,1,1,0.25],"n":100,"replications":1,"methods":["mle","mps"]})";
    const auto a = run("simulate --seed 3 --config " + cfg.string());
    const auto b = run("simulate --seed 3 --config " + cfg.string());
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(parse_csv(a.out).rows.size() == 1 + 2 * 5);
    CHECK(run("simulate --config " + cfg.string()).code == 2);

    const auto bad = temp_file("bad.json");
    std::ofstream(bad) << "{not json";
    CHECK(run("simulate --seed 1 --config " + bad.string()).code == 1);
}
