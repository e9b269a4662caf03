#pragma once

#include <variant>
#include <vector>

#include "celldiff/grid.hpp"
#include "celldiff/model.hpp"

namespace celldiff {

/// alpha(0) <= 0: only the trivial steady state exists.
struct NoPositiveSteadyState {
    double alpha_zero;
};

/// Root of alpha(v) = 0 by bisection (relative tolerance 1e-12).
/// For TrueData the closed form (2 a_w - 1)/k is returned after a cross-check.
std::variant<double, NoPositiveSteadyState> solve_vbar(const FeedbackLaw& law);

/// The bisection root alone, with the bracket expanded from law.scale() by doubling.
/// Throws DomainError when alpha(0) <= 0.
double bisect_vbar(const FeedbackLaw& law);

enum class ProfileMethod {
    Quadrature,        // closed-form integral, Simpson on each grid panel
    SchemeFixedPoint,  // exact stationary point of the upwind scheme
};

struct SteadyState {
    bool exists_positive = false;
    double v_bar = 0.0;
    double w_bar = 0.0;
    std::vector<double> x;      // grid nodes
    std::vector<double> u_bar;  // profile at the nodes
};

struct SteadyResiduals {
    double alpha_w = 0.0;       // |alpha(v_bar) w_bar|
    double transport = 0.0;     // max_x |d/dx(g u) - p u| by centered differences
    double boundary = 0.0;      // |u(x_begin) - boundary value|
    double outflow = 0.0;       // |g(x*) u(x*) - mu v_bar|
    double transport_tol = 0.0; // grid-scaled tolerance for the transport term
    double algebraic_scale = 0.0;
    bool passed = false;
};

/// u(x) = (g(x*)/g(x)) u(x*) exp(-int_x^{x*} p/g), u(x*) = mu v_bar / g(x*).
SteadyState steady_profile(double v_bar, const ContinuousModelParams& params, const Grid& grid,
                           ProfileMethod method = ProfileMethod::Quadrature);

/// Positive steady state if alpha(0) > 0, otherwise the trivial one.
SteadyState steady_state(const ContinuousModelParams& params, const Grid& grid,
                         ProfileMethod method = ProfileMethod::Quadrature);

/// u(x*) for TrueData g: (mu / (k p(x*))) a_w (2 a_w - 1) / (2 a_w - a(x*)).
double closed_form_u_end(const ContinuousModelParams& params);

SteadyResiduals verify_steady(const SteadyState& ss, const ContinuousModelParams& params,
                              const Grid& grid);

}  // namespace celldiff
