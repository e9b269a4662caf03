#include "celldiff/compartment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "celldiff/errors.hpp"

namespace celldiff {

namespace {

void check_state(const CompartmentState& s, const DiscreteModelParams& params) {
    if (s.u.size() != params.n()) {
        throw ConfigError("compartment state has " + std::to_string(s.u.size()) +
                          " entries, model has " + std::to_string(params.n()));
    }
}

// Maturation fluxes g_i = 2 (1 - a_i s) p_i u_i, i = 1..n-1.
std::vector<double> fluxes(const std::vector<double>& u, const DiscreteModelParams& params) {
    const std::size_t n = params.n();
    const double s = signal(u[n - 1], params.k());
    std::vector<double> g(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        g[i] = 2.0 * (1.0 - params.a()[i] * s) * params.p()[i] * u[i];
    }
    return g;
}

double net_growth(const std::vector<double>& u, double u_last, const DiscreteModelParams& params,
                  double* magnitude) {
    const std::size_t n = params.n();
    double sum = 0.0;
    double mag = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double term = (params.p()[i] - params.d()[i]) * u[i];
        sum += term;
        mag += std::abs(params.p()[i] * u[i]) + std::abs(params.d()[i] * u[i]);
    }
    sum -= params.d()[n - 1] * u_last;
    mag += std::abs(params.d()[n - 1] * u_last);
    if (magnitude) *magnitude = mag;
    return sum;
}

}  // namespace

std::vector<double> discrete_rhs(const CompartmentState& state, const DiscreteModelParams& params) {
    check_state(state, params);
    const std::size_t n = params.n();
    const auto& u = state.u;
    const auto g = fluxes(u, params);
    std::vector<double> du(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        du[i] = params.p()[i] * u[i] - g[i] - params.d()[i] * u[i];
        if (i > 0) du[i] += g[i - 1];
    }
    du[n - 1] = g[n - 2] - params.d()[n - 1] * u[n - 1];
    return du;
}

BalanceCheck discrete_mass_balance_residual(const CompartmentState& state,
                                            const std::vector<double>& rhs,
                                            const DiscreteModelParams& params) {
    check_state(state, params);
    const auto& u = state.u;
    const std::size_t n = params.n();
    const auto g = fluxes(u, params);
    double lhs = 0.0;
    for (double r : rhs) lhs += r;
    double mag = 0.0;
    const double net = net_growth(u, u[n - 1], params, &mag);
    // Every addend of the expanded rhs rows: p_i u_i, d_i u_i and each flux twice.
    for (double gi : g) mag += 2.0 * std::abs(gi);
    return {lhs - net, mag};
}

double default_discrete_dt(const DiscreteModelParams& params) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < params.n(); ++i) {
        m = std::min(m, 1.0 / (3.0 * params.p()[i] + params.d()[i]));
    }
    m = std::min(m, 1.0 / params.d().back());
    return 0.5 * m;
}

DiscreteTrajectory integrate_discrete(const DiscreteModelParams& params,
                                      const CompartmentState& init, const DiscreteOptions& options) {
    check_state(init, params);
    for (double x : init.u) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw ConfigError("initial compartment state must be finite and nonnegative");
        }
    }
    const bool matched = !options.matched_dts.empty();
    if (!matched && !(options.t_end > init.t)) {
        throw ConfigError("t_end must exceed the initial time");
    }
    const double dt0 = options.dt > 0.0 ? options.dt : default_discrete_dt(params);
    const std::size_t n = params.n();
    const int stride = std::max(1, options.record_stride);

    DiscreteTrajectory traj;
    if (params.has_interior_death()) {
        traj.events.push_back("note: nonzero interior death rates");
    }
    CompartmentState state = init;
    traj.times.push_back(state.t);
    traj.states.push_back(state);
    traj.balance_residuals.push_back(0.0);

    // One accepted Euler step of length h; returns false on negativity.
    auto attempt = [&](double h, CompartmentState& next, double& step_rel) {
        const auto rhs = discrete_rhs(state, params);
        const auto chk = discrete_mass_balance_residual(state, rhs, params);
        traj.max_rhs_residual = std::max(traj.max_rhs_residual, chk.relative());
        next.u.resize(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            next.u[i] = state.u[i] + h * rhs[i];
        }
        if (options.terminal == TerminalDeath::Implicit) {
            const double influx = rhs[n - 1] + params.d()[n - 1] * state.u[n - 1];
            next.u[n - 1] = (state.u[n - 1] + h * influx) / (1.0 + h * params.d()[n - 1]);
        } else {
            next.u[n - 1] = state.u[n - 1] + h * rhs[n - 1];
        }
        next.t = state.t + h;
        for (double x : next.u) {
            if (!std::isfinite(x)) {
                throw NumericalError("compartment integration produced a non-finite value at t=" +
                                     std::to_string(next.t));
            }
            if (x < 0.0) return false;
        }
        // Step balance: (sum u' - sum u)/h = sum_{i<n} (p_i - d_i) u_i - d_n u_n^*.
        const double u_last =
            options.terminal == TerminalDeath::Implicit ? next.u[n - 1] : state.u[n - 1];
        double mag = 0.0;
        const double net = net_growth(state.u, u_last, params, &mag);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diff += next.u[i] - state.u[i];
            mag += (std::abs(next.u[i]) + std::abs(state.u[i])) / h;
        }
        step_rel = std::abs(diff / h - net) / (mag > 0.0 ? mag : 1.0);
        return true;
    };

    auto advance = [&](double planned) {
        double remaining = planned;
        double sub = planned;
        int rejections = 0;
        double step_rel = 0.0;
        while (remaining > 0.0) {
            const bool last = sub >= remaining;
            const double h = last ? remaining : sub;
            CompartmentState next;
            if (!attempt(h, next, step_rel)) {
                ++rejections;
                std::ostringstream msg;
                msg << "rejected step at t=" << state.t << " (dt=" << h << "): negativity; halving";
                traj.events.push_back(msg.str());
                if (rejections > options.max_rejections) {
                    throw NumericalError("compartment integration: more than " +
                                         std::to_string(options.max_rejections) +
                                         " consecutive step rejections at t=" +
                                         std::to_string(state.t));
                }
                sub = 0.5 * h;
                continue;
            }
            if (last) next.t = state.t + remaining;
            state = std::move(next);
            traj.max_step_residual = std::max(traj.max_step_residual, step_rel);
            remaining = last ? 0.0 : remaining - h;
            rejections = 0;
        }
        ++traj.steps;
        return step_rel;
    };

    auto record = [&](double rel, bool force) {
        if (force || traj.steps % static_cast<std::size_t>(stride) == 0) {
            traj.times.push_back(state.t);
            traj.states.push_back(state);
            traj.balance_residuals.push_back(rel);
        }
    };

    auto stationary = [&]() {
        if (options.stationary_tol <= 0.0) return false;
        const auto rhs = discrete_rhs(state, params);
        double r = 0.0, u = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r += rhs[i] * rhs[i];
            u += state.u[i] * state.u[i];
        }
        return std::sqrt(r) < options.stationary_tol * std::sqrt(u);
    };

    if (matched) {
        for (std::size_t k = 0; k < options.matched_dts.size(); ++k) {
            const double h = options.matched_dts[k];
            if (!(h > 0.0)) throw ConfigError("matched time steps must be positive");
            const double rel = advance(h);
            record(rel, k + 1 == options.matched_dts.size());
        }
        return traj;
    }

    while (state.t < options.t_end) {
        const double h = std::min(dt0, options.t_end - state.t);
        if (!(h > 0.0)) break;
        const double rel = advance(h);
        if (options.t_end - state.t < 1e-12 * options.t_end) state.t = options.t_end;
        traj.stationary = stationary();
        const bool done = state.t >= options.t_end || traj.stationary;
        record(rel, done);
        if (done) break;
    }
    return traj;
}

}  // namespace celldiff
