#pragma once

#include <string>
#include <variant>
#include <vector>

#include "celldiff/characteristic.hpp"

namespace celldiff {

struct HopfPoint {
    double omega = 0.0;     // crossing frequency [1/day]
    double mu = 0.0;        // bifurcation value of mu [1/day]
    int branch = 0;
    double residual = 0.0;  // |F(i omega; mu)|
};

struct HopfResult {
    std::vector<HopfPoint> points;
    std::vector<std::string> notes;
};

/// Imaginary-axis crossings of lambda^2 + mu lambda = -mu c e^{-tau lambda}, c = v_bar |alpha'|.
/// Branch k solves x = A sin x, A = tau c, on (2k pi, 2k pi + pi/2], then mu = omega^2/(c cos x).
HopfResult hopf_simple(double tau, double v_bar, double alpha_prime_abs);

/// Same with c = v_bar |alpha'| given directly.
HopfResult hopf_simple(double tau, double c);

struct HeavisideHopf {
    double delta = 0.0;  // x* - y*
    double mu = 0.0;
    double theta = 0.0;  // omega delta / p_w, in (pi, 3 pi/2]
    double c = 0.0;      // omega / (p_w (2 a_w - 1) B)
};

struct OutOfRange {
    double c = 0.0;
};

std::variant<HeavisideHopf, OutOfRange> heaviside_hopf(double a_w, double B, double p_w,
                                                       double omega);

/// Reduced problem with b = B on [y*, x*]; defaults place y* = 0 and x* = delta.
ReducedProblem heaviside_problem(double a_w, double B, double p_w, const HeavisideHopf& h);

struct CrossingBracket {
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    double omega = 0.0;     // refined minimizer of |G(i omega)| / scale
    double residual = 0.0;  // relative residual at omega
};

/// Scans |G(i omega)|/scale on a uniform grid of `steps` intervals and returns the local minima
/// whose golden-section refinement drops below `tol`.
std::vector<CrossingBracket> imaginary_crossing_scan(const CharProblem& problem, double omega_lo,
                                                     double omega_hi, int steps,
                                                     double tol = 1e-6);

}  // namespace celldiff
