#pragma once

#include <span>
#include <vector>

namespace celldiff {

/// Piecewise-linear coefficient tabulated on a maturity interval.
///
/// Evaluation reproduces nodal values exactly and interpolates linearly
/// between adjacent nodes. Queries outside [front, back] throw DomainError;
/// there is no extrapolation. A round-off slack of 1e-12 of the span is
/// accepted at both ends so that grid endpoints computed in floating point
/// still land on the table.
class CoefficientTable {
public:
    CoefficientTable(std::vector<double> nodes, std::vector<double> values);

    static CoefficientTable constant(double value, double x_begin, double x_end);

    double operator()(double x) const;

    /// Slope of the segment containing x (right-continuous at interior nodes).
    double slope(double x) const;

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> values() const { return values_; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    double min_value() const;
    double max_value() const;
    bool covers(double x_begin, double x_end) const;

private:
    std::size_t segment(double x) const;

    std::vector<double> nodes_;
    std::vector<double> values_;
};

}  // namespace celldiff
