#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ubbs1 {

/// Observations strictly inside (0, 1) plus where they came from. The sorted
/// copy needed by the spacings objective is built once at construction.
class UnitSample {
public:
    explicit UnitSample(std::vector<double> values, std::string source = {});

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& sorted() const { return sorted_; }
    const std::string& source() const { return source_; }
    Eigen::Index n() const { return static_cast<Eigen::Index>(values_.size()); }

    Eigen::Map<const Eigen::VectorXd> as_vector() const { return {values_.data(), n()}; }

    double median() const;

    /// 1 - z for every observation; the law of 1 - Z has the components' roles exchanged.
    UnitSample reflected() const;

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
    std::string source_;
};

}  // namespace ubbs1
