#pragma once

#include <string>

#include "celldiff/errors.hpp"

namespace celldiff {

/// Uniform maturity grid with nodes x_0..x_I, x_0 the stem-cell boundary.
struct Grid {
    int cells = 0;
    double x_begin = 0.0;
    double x_end = 1.0;

    Grid() = default;
    Grid(int I, double begin, double end) : cells(I), x_begin(begin), x_end(end) {
        if (I < 1) throw ConfigError("grid needs at least one cell, got I=" + std::to_string(I));
        if (!(end > begin)) throw ConfigError("grid interval must have positive length");
    }

    double dx() const { return (x_end - x_begin) / cells; }
    double x(int j) const { return j == cells ? x_end : x_begin + j * dx(); }
    int size() const { return cells + 1; }
};

}  // namespace celldiff
