#include "ubbs1/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ubbs1 {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Full-string conversion; accepts nan/inf spellings so they can be diagnosed.
bool to_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace

std::string Ubbs1Params::to_string() const {
    std::ostringstream os;
    os << std::setprecision(17) << alpha1 << ',' << alpha2 << ',' << beta1 << ',' << beta2 << ',' << rho;
    return os.str();
}

Ubbs1Params parse_params(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 5)
        throw ParameterError("expected 5 comma-separated values alpha1,alpha2,beta1,beta2,rho; got '" +
                             std::string(text) + "'");
    double v[5];
    for (std::size_t i = 0; i < 5; ++i)
        if (!to_double(parts[i], v[i]))
            throw ParameterError("cannot parse " + std::string(kParamNames[i]) + " from '" + std::string(parts[i]) + "'");
    Ubbs1Params p{v[0], v[1], v[2], v[3], v[4]};
    p.validate();
    return p;
}

std::vector<double> GridSpec::points() const {
    if (count == 1) return {start};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
    out.back() = stop;
    return out;
}

GridSpec parse_grid(std::string_view text) {
    const auto parts = split(text, ':');
    GridSpec g;
    double count = 0.0;
    if (parts.size() != 3 || !to_double(parts[0], g.start) || !to_double(parts[1], g.stop) ||
        !to_double(parts[2], count))
        throw InputError("grid must look like start:stop:count, got '" + std::string(text) + "'");
    if (!(count >= 1.0) || count != std::floor(count) || count > 1e7)
        throw InputError("grid count must be a positive integer");
    g.count = static_cast<int>(count);
    const bool ok = g.start > 0.0 && g.stop < 1.0 && (g.count == 1 ? g.start == g.stop : g.start < g.stop);
    if (!ok) throw InputError("grid needs 0 < start < stop < 1, got '" + std::string(text) + "'");
    return g;
}

UnitCsv parse_unit_csv(std::istream& in) {
    UnitCsv out;
    std::string line;
    std::size_t row = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view cell = trim(line);
        if (cell.empty()) continue;
        double v;
        if (!to_double(cell, v)) {
            if (!seen_data && (cell == "z" || cell == "\"z\"")) {
                seen_data = true;
                continue;
            }
            throw InputError("row " + std::to_string(row) + ": cannot parse '" + std::string(cell) + "' as a number");
        }
        seen_data = true;
        if (!std::isfinite(v)) {
            ++out.rejected_non_finite;
            out.diagnostics.push_back("row " + std::to_string(row) + ": non-finite value '" + std::string(cell) + "'");
        } else if (!(v > 0.0 && v < 1.0)) {
            ++out.rejected_out_of_range;
            out.diagnostics.push_back("row " + std::to_string(row) + ": value " + std::string(cell) +
                                      " outside (0, 1)");
        } else {
            out.values.push_back(v);
        }
    }
    return out;
}

UnitCsv read_unit_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return parse_unit_csv(in);
}

nlohmann::json to_json(const Ubbs1Params& p) {
    return {{"alpha1", p.alpha1}, {"alpha2", p.alpha2}, {"beta1", p.beta1}, {"beta2", p.beta2}, {"rho", p.rho}};
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j = to_json(r.params);
    j["method"] = std::string(to_string(r.method));
    j["loglik"] = r.loglik;
    j["aic"] = r.aic;
    j["bic"] = r.bic;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    return j;
}

}  // namespace ubbs1
