#pragma once

#include <optional>
#include <string>
#include <vector>

#include "celldiff/characteristic.hpp"

namespace celldiff {

struct Box {
    double re_min, re_max, im_min, im_max;
};

/// [-5S, S] x [-40S, 40S] with S = problem_scale, widened to contain the
/// right-half-plane modulus bound when one is available.
Box default_box(const CharProblem& problem);

/// Winding number of G around the box boundary (counterclockwise).
/// Returns nullopt if G nearly vanishes on the contour; throws NumericalError when the
/// integrated phase and the exact endpoint phases disagree by more than 0.25 turns.
std::optional<int> winding_number(const CharProblem& problem, const Box& box);

struct RootReport {
    Box box{};                       // box after any nudges
    int count = 0;                   // zeros of G in the box
    int rhp_count = 0;               // zeros with Re > 0 in the box
    std::vector<cplx> roots;         // polished roots
    std::vector<double> residuals;   // |G| at each root
    std::optional<cplx> rightmost;
    double rightmost_residual = 0.0;
    std::vector<std::string> notes;
};

/// Counts and localizes zeros of G = lambda F in the box, polishes them by Newton, and
/// reports the rightmost one and the number with positive real part.
RootReport rightmost_root(const CharProblem& problem, const std::optional<Box>& box = std::nullopt);

/// Newton iteration on G with a centered-difference derivative.
cplx newton_polish(const CharProblem& problem, cplx start, int max_iter = 100);

}  // namespace celldiff
