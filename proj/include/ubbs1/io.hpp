#pragma once

// Text formats shared by the command-line tool: parameter strings, grids,
// single-column CSV input and JSON output.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ubbs1/estimation.hpp"

namespace ubbs1 {

/// Malformed input file or text.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `start:stop:count` with 0 < start < stop < 1 (count >= 2), or a single point when count is 1.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    std::vector<double> points() const;
};

GridSpec parse_grid(std::string_view text);

/// Single numeric column, optionally headed `z`. Rows outside (0, 1) and
/// non-finite rows are dropped and described in `diagnostics`.
struct UnitCsv {
    std::vector<double> values;
    std::size_t rejected_out_of_range = 0;
    std::size_t rejected_non_finite = 0;
    std::vector<std::string> diagnostics;
};

UnitCsv parse_unit_csv(std::istream& in);
UnitCsv read_unit_csv(const std::string& path);

nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const Ubbs1Params& p);

}  // namespace ubbs1
