#include "celldiff/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celldiff/errors.hpp"
#include "celldiff/numerics.hpp"

namespace celldiff {

double bisect_vbar(const FeedbackLaw& law) {
    const double a0 = law(0.0);
    if (!(a0 > 0.0)) {
        throw DomainError("no positive steady state: alpha(0)=" + std::to_string(a0) + " <= 0");
    }
    double hi = law.scale();
    int doublings = 0;
    while (!(law(hi) < 0.0)) {
        if (++doublings > 60) {
            throw NumericalError("steady state bracket not found after 60 doublings");
        }
        hi *= 2.0;
    }
    return bisect([&](double v) { return law(v); }, 0.0, hi, 1e-12);
}

std::variant<double, NoPositiveSteadyState> solve_vbar(const FeedbackLaw& law) {
    const double a0 = law(0.0);
    if (!(a0 > 0.0)) {
        return NoPositiveSteadyState{a0};
    }
    const double root = bisect_vbar(law);
    if (const auto* t = law.true_data_params()) {
        const double closed = (2.0 * t->a_w - 1.0) / t->k;
        if (std::abs(root - closed) > 1e-10 * closed) {
            throw NumericalError("bisection root " + std::to_string(root) +
                                 " disagrees with the closed form " + std::to_string(closed));
        }
        return closed;
    }
    return root;
}

double closed_form_u_end(const ContinuousModelParams& params) {
    const auto* t = params.alpha_law().true_data_params();
    if (!t || !params.true_data_g()) {
        throw ConfigError("closed-form u(x*) needs TrueData alpha and TrueData g");
    }
    const double xs = params.x_star();
    const double a_end = params.a(xs);
    return params.mu() / (params.k() * params.p(xs)) * t->a_w * (2.0 * t->a_w - 1.0) /
           (2.0 * t->a_w - a_end) / params.epsilon();
}

SteadyState steady_profile(double v_bar, const ContinuousModelParams& params, const Grid& grid,
                           ProfileMethod method) {
    if (!(v_bar > 0.0)) {
        throw DomainError("steady_profile needs a positive v_bar");
    }
    const int I = grid.cells;
    const double h = grid.dx();
    const double eps = params.epsilon();
    SteadyState ss;
    ss.exists_positive = true;
    ss.v_bar = v_bar;
    ss.x.resize(grid.size());
    ss.u_bar.resize(grid.size());
    std::vector<double> g(grid.size());
    for (int j = 0; j <= I; ++j) {
        ss.x[j] = grid.x(j);
        g[j] = params.g(ss.x[j], v_bar);
    }
    const double u_end = params.mu() * v_bar / (eps * g[I]);
    ss.u_bar[I] = u_end;

    if (method == ProfileMethod::Quadrature) {
        auto f = [&](double x) { return params.p(x) / (eps * params.g(x, v_bar)); };
        double tail = 0.0;  // int_{x_j}^{x*} p / (eps g)
        double f_right = f(ss.x[I]);
        for (int j = I - 1; j >= 0; --j) {
            const double f_left = f(ss.x[j]);
            const double mid = 0.5 * (ss.x[j] + ss.x[j + 1]);
            tail += (h / 6.0) * (f_left + 4.0 * f(mid) + f_right);
            f_right = f_left;
            ss.u_bar[j] = g[I] / g[j] * u_end * std::exp(-tail);
        }
    } else {
        for (int j = I; j >= 1; --j) {
            const double factor = g[j] - h * params.p(ss.x[j]) / eps;
            if (!(factor > 0.0)) {
                throw NumericalError("scheme steady state is not positive: dx p > eps g at x=" +
                                     std::to_string(ss.x[j]) + "; refine the grid");
            }
            ss.u_bar[j - 1] = ss.u_bar[j] * factor / g[j - 1];
        }
    }
    ss.w_bar = params.boundary() == BoundaryMode::Simplified
                   ? ss.u_bar[0]
                   : ss.u_bar[0] / params.boundary_factor(v_bar);
    return ss;
}

SteadyState steady_state(const ContinuousModelParams& params, const Grid& grid,
                         ProfileMethod method) {
    const auto root = solve_vbar(params.alpha_law());
    if (std::holds_alternative<NoPositiveSteadyState>(root)) {
        SteadyState trivial;
        trivial.x.resize(grid.size());
        for (int j = 0; j <= grid.cells; ++j) trivial.x[j] = grid.x(j);
        trivial.u_bar.assign(grid.size(), 0.0);
        return trivial;
    }
    return steady_profile(std::get<double>(root), params, grid, method);
}

SteadyResiduals verify_steady(const SteadyState& ss, const ContinuousModelParams& params,
                              const Grid& grid) {
    if (static_cast<int>(ss.u_bar.size()) != grid.size()) {
        throw ConfigError("verify_steady: profile does not match the grid");
    }
    const int I = grid.cells;
    const double h = grid.dx();
    const double eps = params.epsilon();
    SteadyResiduals r;
    std::vector<double> gu(grid.size());
    double pu_max = 0.0;
    for (int j = 0; j <= I; ++j) {
        const double x = grid.x(j);
        gu[j] = params.g(x, ss.v_bar) * ss.u_bar[j];
        pu_max = std::max(pu_max, std::abs(params.p(x) * ss.u_bar[j]));
    }
    for (int j = 1; j < I; ++j) {
        const double deriv = eps * (gu[j + 1] - gu[j - 1]) / (2.0 * h);
        r.transport = std::max(r.transport, std::abs(deriv - params.p(grid.x(j)) * ss.u_bar[j]));
    }
    const double rel_dx = h / params.length();
    r.transport_tol = 40.0 * rel_dx * rel_dx * pu_max;

    r.alpha_w = std::abs(params.alpha(ss.v_bar) * ss.w_bar);
    const double boundary_value = params.boundary() == BoundaryMode::Simplified
                                      ? ss.w_bar
                                      : params.boundary_factor(ss.v_bar) * ss.w_bar;
    r.boundary = std::abs(ss.u_bar[0] - boundary_value);
    r.outflow = std::abs(eps * gu[I] - params.mu() * ss.v_bar);

    const double a_scale = std::abs(params.alpha_law().at_zero()) * ss.w_bar;
    r.algebraic_scale = std::max({a_scale, ss.w_bar, params.mu() * ss.v_bar});
    r.passed = r.transport <= r.transport_tol && r.alpha_w <= 1e-10 * a_scale &&
               r.boundary <= 1e-10 * ss.w_bar && r.outflow <= 1e-10 * params.mu() * ss.v_bar;
    return r;
}

}  // namespace celldiff
