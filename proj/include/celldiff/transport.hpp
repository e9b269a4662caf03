#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "celldiff/compartment.hpp"
#include "celldiff/grid.hpp"
#include "celldiff/model.hpp"

namespace celldiff {

struct PdeState {
    double w = 0.0;
    std::vector<double> u;  // u_0 (boundary) .. u_I
    double v = 0.0;
    double t = 0.0;
};

/// Thrown when a step produces NaN or significant negativity.
class StepError : public NumericalError {
public:
    StepError(const std::string& what, PdeState last_valid)
        : NumericalError(what), last_valid_(std::move(last_valid)) {}
    const PdeState& last_valid() const { return last_valid_; }

private:
    PdeState last_valid_;
};

/// Initial density: a constant or a table sampled as cell averages.
using InitialDensity = std::variant<double, CoefficientTable>;

/// Builds (w0, u^0, v0); u_0 is set from the boundary rule, u defaults to the constant w0.
PdeState make_initial_state(const ContinuousModelParams& params, const Grid& grid, double w0,
                            double v0, const std::optional<InitialDensity>& u0 = std::nullopt);

/// dx / (epsilon max_j g(x_j, v)).
double cfl_dt(const PdeState& state, const ContinuousModelParams& params, const Grid& grid);

/// One step of the upwind scheme with the given time step.
PdeState step(const PdeState& state, const ContinuousModelParams& params, const Grid& grid,
              double dt);
/// One step with dt from cfl_dt.
PdeState step(const PdeState& state, const ContinuousModelParams& params, const Grid& grid);

/// Discrete cell-number balance of one step, with the u-sums weighted by dx.
BalanceCheck pde_mass_balance_residual(const PdeState& old_state, const PdeState& new_state,
                                       double dt, const ContinuousModelParams& params,
                                       const Grid& grid);

/// sqrt(sum ((u_new - u_old)/dt)^2 dx / sum u_new^2 dx); nullopt when the denominator vanishes.
std::optional<double> stability_metric(const std::vector<double>& u_old,
                                       const std::vector<double>& u_new, double dt,
                                       const Grid& grid);

struct RunOptions {
    double t_end = 1.0;
    int snapshot_count = 200;
    int series_stride = 1;  // record every n-th step (the last step is always recorded)
    bool keep_dts = false;  // store every accepted dt (for matched compartment runs)
};

struct PdeTrajectory {
    std::vector<double> times;
    std::vector<double> w;
    std::vector<double> v;
    std::vector<double> metric;    // NaN where undefined
    std::vector<double> residual;  // relative balance residual of the step ending here
    std::vector<double> dt;
    std::vector<double> u_min;     // min_j u_j
    std::vector<double> u_max;     // max_j u_j
    std::vector<double> u_mass;    // sum_{j>=1} u_j dx
    std::vector<PdeState> snapshots;
    std::vector<double> all_dts;
    std::size_t steps = 0;
    double max_residual = 0.0;
    double max_theta = 0.0;
    PdeState final_state;
};

PdeTrajectory run(const ContinuousModelParams& params, const Grid& grid, const PdeState& init,
                  const RunOptions& options);

}  // namespace celldiff
