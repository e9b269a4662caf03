#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "celldiff/model.hpp"

namespace celldiff {

struct CompartmentState {
    std::vector<double> u;  // u_1..u_n
    double t = 0.0;
};

/// Residual of a balance identity together with the sum of magnitudes of its addends.
struct BalanceCheck {
    double residual = 0.0;
    double scale = 0.0;
    double relative() const { return scale > 0.0 ? std::abs(residual) / scale : 0.0; }
};

std::vector<double> discrete_rhs(const CompartmentState& state, const DiscreteModelParams& params);

/// sum_i rhs_i - (sum_{i<n} (p_i - d_i) u_i - d_n u_n).
BalanceCheck discrete_mass_balance_residual(const CompartmentState& state,
                                            const std::vector<double>& rhs,
                                            const DiscreteModelParams& params);

enum class TerminalDeath {
    Explicit,  // u_n += dt (g_{n-1} - d_n u_n)
    Implicit,  // u_n = (u_n + dt g_{n-1}) / (1 + dt d_n), mirrors the transport scheme
};

struct DiscreteOptions {
    double t_end = 1.0;
    double dt = 0.0;                  // 0 selects 0.5 min_i 1/(3 p_i + d_i)
    std::vector<double> matched_dts;  // if non-empty, consumed in order instead of dt
    TerminalDeath terminal = TerminalDeath::Explicit;
    double stationary_tol = 0.0;      // stop once |rhs| < tol |u|; 0 disables
    int max_rejections = 60;
    int record_stride = 1;
};

struct DiscreteTrajectory {
    std::vector<double> times;
    std::vector<CompartmentState> states;
    std::vector<double> balance_residuals;  // relative, for the step ending at each record
    double max_rhs_residual = 0.0;          // relative, worst algebraic check over all steps
    double max_step_residual = 0.0;         // relative, worst step balance over all steps
    std::size_t steps = 0;
    bool stationary = false;
    std::vector<std::string> events;
};

double default_discrete_dt(const DiscreteModelParams& params);

DiscreteTrajectory integrate_discrete(const DiscreteModelParams& params,
                                      const CompartmentState& init, const DiscreteOptions& options);

}  // namespace celldiff
