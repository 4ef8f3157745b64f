#include "ubbs1/sample.hpp"

#include <algorithm>
#include <cmath>

#include "ubbs1/errors.hpp"

namespace ubbs1 {

UnitSample::UnitSample(std::vector<double> values, std::string source)
    : values_(std::move(values)), source_(std::move(source)) {
    if (values_.empty()) throw InsufficientData("UnitSample: no observations");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0 && values_[i] < 1.0))
            throw DomainError("UnitSample: observation " + std::to_string(i) + " = " + std::to_string(values_[i]) +
                              " is not strictly inside (0, 1)");
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
}

double UnitSample::median() const {
    const std::size_t n = sorted_.size();
    return n % 2 == 1 ? sorted_[n / 2] : 0.5 * (sorted_[n / 2 - 1] + sorted_[n / 2]);
}

UnitSample UnitSample::reflected() const {
    std::vector<double> flipped(values_.size());
    std::transform(values_.begin(), values_.end(), flipped.begin(), [](double z) { return 1.0 - z; });
    return UnitSample(std::move(flipped), source_.empty() ? "reflected" : source_ + " (reflected)");
}

}  // namespace ubbs1
