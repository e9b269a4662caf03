#include "celldiff/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "celldiff/errors.hpp"

namespace celldiff {

namespace {

void check_grid(const ContinuousModelParams& params, const Grid& grid) {
    const double tol = 1e-12 * std::max(1.0, params.length());
    if (std::abs(grid.x_begin - params.x_begin()) > tol ||
        std::abs(grid.x_end - params.x_star()) > tol) {
        throw ConfigError("grid does not span the model's maturity interval");
    }
}

void check_state(const PdeState& s, const Grid& grid) {
    if (static_cast<int>(s.u.size()) != grid.size()) {
        throw ConfigError("state has " + std::to_string(s.u.size()) + " density cells, grid has " +
                          std::to_string(grid.size()));
    }
}

std::vector<double> g_row(const ContinuousModelParams& params, const Grid& grid, double v) {
    std::vector<double> g(grid.size());
    for (int j = 0; j <= grid.cells; ++j) {
        g[j] = params.g(grid.x(j), v);
    }
    return g;
}

double boundary_value(const ContinuousModelParams& params, double w, double v) {
    return params.boundary() == BoundaryMode::Simplified ? w : params.boundary_factor(v) * w;
}

double cell_average(const CoefficientTable& table, double a, double b) {
    return (table(a) + 4.0 * table(0.5 * (a + b)) + table(b)) / 6.0;
}

std::string dump(const PdeState& s) {
    std::ostringstream out;
    out.precision(17);
    out << "t=" << s.t << " w=" << s.w << " v=" << s.v << " u=[";
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        out << (j ? ", " : "") << s.u[j];
    }
    out << "]";
    return out.str();
}

}  // namespace

PdeState make_initial_state(const ContinuousModelParams& params, const Grid& grid, double w0,
                            double v0, const std::optional<InitialDensity>& u0) {
    check_grid(params, grid);
    if (!(w0 >= 0.0) || !(v0 >= 0.0) || !std::isfinite(w0) || !std::isfinite(v0)) {
        throw ConfigError("initial w0 and v0 must be finite and nonnegative");
    }
    PdeState s;
    s.w = w0;
    s.v = v0;
    s.u.assign(grid.size(), 0.0);
    const InitialDensity density = u0.value_or(InitialDensity{w0});
    const double half = 0.5 * grid.dx();
    for (int j = 1; j <= grid.cells; ++j) {
        if (const auto* c = std::get_if<double>(&density)) {
            s.u[j] = *c;
        } else {
            const auto& table = std::get<CoefficientTable>(density);
            const double a = std::max(grid.x(j) - half, grid.x_begin);
            const double b = std::min(grid.x(j) + half, grid.x_end);
            s.u[j] = cell_average(table, a, b);
        }
        if (!(s.u[j] >= 0.0) || !std::isfinite(s.u[j])) {
            throw ConfigError("initial density must be finite and nonnegative");
        }
    }
    s.u[0] = boundary_value(params, w0, v0);
    return s;
}

double cfl_dt(const PdeState& state, const ContinuousModelParams& params, const Grid& grid) {
    double gmax = 0.0;
    for (int j = 0; j <= grid.cells; ++j) {
        gmax = std::max(gmax, params.g(grid.x(j), state.v));
    }
    if (!(gmax > 0.0) || !std::isfinite(gmax)) {
        throw NumericalError("cfl_dt: maximal maturation rate is not positive at v=" +
                             std::to_string(state.v));
    }
    return grid.dx() / (params.epsilon() * gmax);
}

PdeState step(const PdeState& state, const ContinuousModelParams& params, const Grid& grid,
              double dt) {
    check_state(state, grid);
    if (!(dt > 0.0)) {
        throw ConfigError("step: dt must be positive");
    }
    const int I = grid.cells;
    const double dx = grid.dx();
    const double eps = params.epsilon();
    const auto g = g_row(params, grid, state.v);

    PdeState next;
    next.t = state.t + dt;
    next.w = (1.0 + dt * params.alpha(state.v)) * state.w;
    next.u.resize(state.u.size());
    next.u[0] = boundary_value(params, next.w, state.v);
    const double c = eps * dt / dx;
    for (int j = 1; j <= I; ++j) {
        const double p = params.p(grid.x(j));
        next.u[j] = state.u[j] - c * (g[j] * state.u[j] - g[j - 1] * state.u[j - 1]) +
                    dt * p * state.u[j];
    }
    next.v = (state.v + dt * eps * g[I] * state.u[I]) / (1.0 + dt * params.mu());

    double scale = std::abs(state.w) + std::abs(state.v);
    for (double x : state.u) scale = std::max(scale, std::abs(x));
    const double floor = -1e-12 * scale;
    auto bad = [&](double x) { return !std::isfinite(x) || x < floor; };
    bool failed = bad(next.w) || bad(next.v);
    for (double x : next.u) failed = failed || bad(x);
    if (failed) {
        throw StepError("transport step failed (NaN or negativity) from " + dump(state) +
                            " with dt=" + std::to_string(dt) + "; produced " + dump(next),
                        state);
    }
    return next;
}

PdeState step(const PdeState& state, const ContinuousModelParams& params, const Grid& grid) {
    return step(state, params, grid, cfl_dt(state, params, grid));
}

BalanceCheck pde_mass_balance_residual(const PdeState& old_state, const PdeState& new_state,
                                       double dt, const ContinuousModelParams& params,
                                       const Grid& grid) {
    check_state(old_state, grid);
    check_state(new_state, grid);
    const double dx = grid.dx();
    const double a = params.alpha(old_state.v);
    const double g0 = params.g(grid.x(0), old_state.v);

    double lhs = (new_state.w - old_state.w) / dt + (new_state.v - old_state.v) / dt;
    double mag = (std::abs(new_state.w) + std::abs(old_state.w) + std::abs(new_state.v) +
                  std::abs(old_state.v)) / dt;
    double growth = 0.0;
    for (int j = 1; j <= grid.cells; ++j) {
        lhs += (new_state.u[j] - old_state.u[j]) * dx / dt;
        mag += (std::abs(new_state.u[j]) + std::abs(old_state.u[j])) * dx / dt;
        const double pu = params.p(grid.x(j)) * old_state.u[j] * dx;
        growth += pu;
        mag += std::abs(pu);
    }
    const double inflow = params.epsilon() * g0 * old_state.u[0];
    const double rhs = a * old_state.w + inflow + growth - params.mu() * new_state.v;
    mag += std::abs(a * old_state.w) + std::abs(inflow) + std::abs(params.mu() * new_state.v);
    return {lhs - rhs, mag};
}

std::optional<double> stability_metric(const std::vector<double>& u_old,
                                       const std::vector<double>& u_new, double dt,
                                       const Grid& grid) {
    if (u_old.size() != u_new.size() || static_cast<int>(u_new.size()) != grid.size()) {
        throw ConfigError("stability_metric: profile sizes do not match the grid");
    }
    const double dx = grid.dx();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u_new.size(); ++j) {
        const double r = (u_new[j] - u_old[j]) / dt;
        num += r * r * dx;
        den += u_new[j] * u_new[j] * dx;
    }
    if (!(den > 0.0)) return std::nullopt;
    return std::sqrt(num / den);
}

PdeTrajectory run(const ContinuousModelParams& params, const Grid& grid, const PdeState& init,
                  const RunOptions& options) {
    check_grid(params, grid);
    check_state(init, grid);
    if (!(options.t_end > init.t)) {
        throw ConfigError("run: t_end must exceed the initial time");
    }
    if (!(init.w >= 0.0) || !(init.v >= 0.0) ||
        std::any_of(init.u.begin(), init.u.end(), [](double x) { return !(x >= 0.0); })) {
        throw ConfigError("run: initial state must be nonnegative");
    }
    const int stride = std::max(1, options.series_stride);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double t0 = init.t;
    const double span = options.t_end - t0;

    PdeTrajectory traj;
    auto push = [&](const PdeState& s, double metric, double residual, double dt) {
        traj.times.push_back(s.t);
        traj.w.push_back(s.w);
        traj.v.push_back(s.v);
        traj.metric.push_back(metric);
        traj.residual.push_back(residual);
        traj.dt.push_back(dt);
        // Extremes over the maturing cells; u_0 is the boundary copy of w.
        const auto [lo, hi] = std::minmax_element(s.u.begin() + 1, s.u.end());
        traj.u_min.push_back(*lo);
        traj.u_max.push_back(*hi);
        double mass = 0.0;
        for (int j = 1; j <= grid.cells; ++j) mass += s.u[j];
        traj.u_mass.push_back(mass * grid.dx());
    };

    const int snaps = std::max(0, options.snapshot_count);
    int next_snap = 0;
    auto snapshot_due = [&](double t) {
        if (snaps == 0) return false;
        if (snaps == 1) return next_snap == 0;
        return t >= t0 + span * next_snap / (snaps - 1) - 1e-12 * span;
    };

    PdeState state = init;
    push(state, nan, 0.0, 0.0);
    if (snapshot_due(state.t)) {
        traj.snapshots.push_back(state);
        ++next_snap;
    }
    const double dx = grid.dx();
    while (state.t < options.t_end) {
        double dt = cfl_dt(state, params, grid);
        bool last = false;
        if (state.t + dt >= options.t_end) {
            dt = options.t_end - state.t;
            last = true;
        }
        double gmax = 0.0;
        for (int j = 0; j <= grid.cells; ++j) gmax = std::max(gmax, params.g(grid.x(j), state.v));
        traj.max_theta = std::max(traj.max_theta, params.epsilon() * gmax * dt / dx);

        PdeState next = step(state, params, grid, dt);
        if (last) next.t = options.t_end;
        const auto bal = pde_mass_balance_residual(state, next, dt, params, grid);
        const double rel = bal.relative();
        traj.max_residual = std::max(traj.max_residual, rel);
        const auto metric = stability_metric(state.u, next.u, dt, grid);
        if (options.keep_dts) traj.all_dts.push_back(dt);
        ++traj.steps;
        state = std::move(next);
        if (last || traj.steps % static_cast<std::size_t>(stride) == 0) {
            push(state, metric.value_or(nan), rel, dt);
        }
        while (next_snap < snaps && snapshot_due(state.t)) {
            traj.snapshots.push_back(state);
            ++next_snap;
        }
        if (last) break;
    }
    traj.final_state = state;
    return traj;
}

}  // namespace celldiff
