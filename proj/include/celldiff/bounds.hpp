#pragma once

#include <string>
#include <vector>

#include "celldiff/grid.hpp"
#include "celldiff/model.hpp"
#include "celldiff/transport.hpp"

namespace celldiff {

/// A priori bounds for the continuous model, valid for t >= t_valid.
///
/// The ratio constants grow like e^{M L} and overflow for realistic
/// coefficient tables, so they are carried as natural logarithms; the
/// plain accessors return exp(log_*), which may be +inf.
struct BoundsCertificate {
    bool available = false;
    std::string reason;  // why the certificate is unavailable

    double M = 0.0;        // sup |d/dx ln u|
    double log_M1 = 0.0;   // w <= M1 u(x)
    double log_M2 = 0.0;   // w <= M2 v
    double log_M3 = 0.0;   // u(x) <= M3 w
    double log_M4 = 0.0;   // v <= M4 w^gamma
    double gamma = 0.5;
    double t_valid = 0.0;  // L / g_-

    // Ingredients of M.
    double z_boundary = 0.0;  // sup_v |z(x_begin, .)|
    double z_initial = 0.0;   // sup_x |d/dx ln u0|
    double q_over_g = 0.0;    // sup |Q / g|, Q = -g_xx + p_x
    double gx_over_g = 0.0;   // sup |g_x / g|

    double M1() const;
    double M2() const;
    double M3() const;
    double M4() const;
};

BoundsCertificate apriori_bounds(const ContinuousModelParams& params, const Grid& grid,
                                 const PdeState& init);

struct BoundViolation {
    double t;
    std::string which;  // "M1", "M2", "M3" or "M4"
    double log_margin;  // ln(lhs) - ln(rhs) > 0
};

struct BoundsReport {
    std::vector<BoundViolation> violations;
    std::size_t checked = 0;  // recorded times with t >= t_valid
};

BoundsReport check_bounds(const PdeTrajectory& traj, const BoundsCertificate& cert);

}  // namespace celldiff
