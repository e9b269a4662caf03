#include "celldiff/coefficient_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celldiff/errors.hpp"

namespace celldiff {

CoefficientTable::CoefficientTable(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() < 2) {
        throw ConfigError("coefficient table needs at least two nodes");
    }
    if (nodes_.size() != values_.size()) {
        throw ConfigError("coefficient table: nodes and values differ in length (" +
                          std::to_string(nodes_.size()) + " vs " +
                          std::to_string(values_.size()) + ")");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i])) {
            throw ConfigError("coefficient table contains a non-finite entry");
        }
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
            throw ConfigError("coefficient table nodes must be strictly increasing");
        }
    }
}

CoefficientTable CoefficientTable::constant(double value, double x_begin, double x_end) {
    return CoefficientTable({x_begin, x_end}, {value, value});
}

std::size_t CoefficientTable::segment(double x) const {
    const double span = nodes_.back() - nodes_.front();
    const double slack = 1e-12 * std::max(1.0, span);
    if (!(x >= nodes_.front() - slack && x <= nodes_.back() + slack)) {
        throw DomainError("coefficient table queried at x=" + std::to_string(x) +
                          " outside [" + std::to_string(nodes_.front()) + ", " +
                          std::to_string(nodes_.back()) + "]");
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    if (it == nodes_.begin()) {
        return 0;
    }
    auto idx = static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
    return std::min(idx, nodes_.size() - 2);
}

double CoefficientTable::operator()(double x) const {
    const std::size_t i = segment(x);
    if (x <= nodes_[i]) {
        return values_[i];
    }
    if (x >= nodes_[i + 1]) {
        return values_[i + 1];
    }
    const double t = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    return values_[i] + (values_[i + 1] - values_[i]) * t;
}

double CoefficientTable::slope(double x) const {
    const std::size_t i = segment(x);
    return (values_[i + 1] - values_[i]) / (nodes_[i + 1] - nodes_[i]);
}

double CoefficientTable::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double CoefficientTable::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

bool CoefficientTable::covers(double x_begin, double x_end) const {
    const double slack = 1e-12 * std::max(1.0, nodes_.back() - nodes_.front());
    return x_begin >= nodes_.front() - slack && x_end <= nodes_.back() + slack;
}

}  // namespace celldiff
