#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "celldiff/model.hpp"
#include "celldiff/numerics.hpp"
#include "celldiff/steady_state.hpp"

namespace celldiff {

/// lambda^2 + mu lambda = A e^{-tau lambda}, A = mu v_bar alpha'(v_bar).
struct DelayProblem {
    double mu = 1.0;
    double tau = 1.0;
    double A = -1.0;

    /// tau = int dx / g(x, v_bar) by Simpson on `panels` panels; requires alpha(0) > 0.
    static DelayProblem from_model(const ContinuousModelParams& params, int panels = 2000);
};

/// Piecewise-linear profile on disjoint segments; zero elsewhere. Jumps are allowed
/// between segments.
struct SegmentProfile {
    struct Segment {
        double x0, x1;  // x0 < x1
        double b0, b1;  // values at x0 and x1
    };
    std::vector<Segment> segments;

    double operator()(double x) const;
    double l1_norm() const;
    /// B on [y_star, x_star].
    static SegmentProfile step(double B, double y_star, double x_star);
    /// (p - p_w) / p_w segment by segment.
    static SegmentProfile excess(const CoefficientTable& p, double p_w);
};

/// lambda^2 + C lambda + D = -(D/p_w) lambda int_0^{x*} b(x) e^{lambda (x - x*)/p_w} dx.
struct ReducedProblem {
    double C = 1.0;
    double D = 1.0;
    double p_w = 1.0;
    double x_star = 1.0;
    SegmentProfile b;

    /// C = mu/(2 a_w), D = p_w mu (2 a_w - 1)/(2 a_w).
    static ReducedProblem from_model(double mu, double a_w, double p_w, SegmentProfile b,
                                     double x_star);
};

/// g independent of x: lambda + mu/(2a_w) = -(mu/(2a_w))(2a_w-1)(p_w/lambda +
/// int (p/p_w) e^{lambda x/p_w} dx) e^{-lambda L/p_w}, x measured from the table start.
struct GConstProblem {
    double mu = 1.0;
    double a_w = 0.75;
    double p_w = 1.0;
    CoefficientTable p = CoefficientTable::constant(1.0, 0.0, 1.0);
};

/// TrueData form of the general equation; x-integrals by composite Simpson on sampled nodes.
struct TrueDataGeneralProblem {
    double mu = 1.0;
    double k = 1.0;
    double a_w = 0.75;
    double p_w = 1.0;
    double h = 0.0;               // node spacing
    std::vector<double> dgdv;     // dg/dv(x_i, v_bar)
    std::vector<double> g;        // g(x_i, v_bar)
    std::vector<double> p;        // p(x_i)
    std::vector<double> Lambda;   // int_0^{x_i} 1/g

    static TrueDataGeneralProblem from_model(const ContinuousModelParams& params, int panels = 2000);
};

/// General characteristic equation from the steady state and the auxiliary function
/// f = -(d/dx)[dg/dv u_bar] e^{-int_0^x p/g}.
struct GeneralProblem {
    double mu = 1.0;
    double alpha_prime = 0.0;     // alpha'(v_bar)
    double w_bar = 0.0;
    double v_bar = 0.0;
    double h = 0.0;
    double hu_end = 0.0;          // dg/dv(x*, v_bar) u_bar(x*)
    double g0 = 0.0;              // g(0, v_bar)
    double p0 = 0.0;              // p(0)
    std::vector<double> hu_prime; // d/dx [dg/dv u_bar] at the nodes
    std::vector<double> Lambda;   // int_0^{x_i} 1/g
    std::vector<double> P;        // int_0^{x_i} p/g

    static GeneralProblem from_model(const ContinuousModelParams& params, int panels = 2000);
};

using CharProblem =
    std::variant<DelayProblem, ReducedProblem, GConstProblem, TrueDataGeneralProblem, GeneralProblem>;

/// G(lambda) = lambda F(lambda), entire in lambda, with the sum of term magnitudes.
struct CharValue {
    cplx value;
    double scale;
};

CharValue char_G(const CharProblem& problem, cplx lambda);

/// F(lambda) = G(lambda)/lambda: the variant's equation, LHS - RHS, in the form carrying
/// the 1/lambda term. Throws DomainError at lambda = 0.
cplx char_eval(const CharProblem& problem, cplx lambda);

/// Roots of lambda^2 + C lambda + D.
std::pair<cplx, cplx> quadratic_roots(double C, double D);

/// A bound rho with no zero of G in {Re >= 0, |lambda| > rho}; nullopt if none is available.
std::optional<double> rhp_modulus_bound(const CharProblem& problem);

/// Characteristic scale S = max(mu, p_w, 1) used for default search boxes.
double problem_scale(const CharProblem& problem);

}  // namespace celldiff
