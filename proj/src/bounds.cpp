#include "celldiff/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "celldiff/errors.hpp"
#include "celldiff/numerics.hpp"

namespace celldiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First derivative on the grid nodes: centered inside, second-order one-sided at the ends.
std::vector<double> d1(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        const double s = (f.back() - f.front()) / h;
        std::fill(d.begin(), d.end(), s);
        return d;
    }
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

std::vector<double> d2(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h);
    if (n >= 4) {
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
    } else {
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    return d;
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

}  // namespace

double BoundsCertificate::M1() const { return std::exp(log_M1); }
double BoundsCertificate::M2() const { return std::exp(log_M2); }
double BoundsCertificate::M3() const { return std::exp(log_M3); }
double BoundsCertificate::M4() const { return std::exp(log_M4); }

BoundsCertificate apriori_bounds(const ContinuousModelParams& params, const Grid& grid,
                                 const PdeState& init) {
    BoundsCertificate cert;
    if (static_cast<int>(init.u.size()) != grid.size()) {
        throw ConfigError("apriori_bounds: state does not match the grid");
    }
    if (params.boundary() != BoundaryMode::Simplified) {
        cert.reason = "certificate is implemented for the simplified boundary u(0,t)=w(t) only";
        return cert;
    }
    if (!(init.w > 0.0)) {
        cert.reason = "w(0) must be positive";
        return cert;
    }
    for (double u : init.u) {
        if (!(u > 0.0)) {
            cert.reason = "initial density has zeros, so d/dx ln u0 is undefined";
            return cert;
        }
    }

    const double L = params.length();
    const double h = grid.dx();
    const auto& law = params.alpha_law();
    const double a0 = law.at_zero();
    const double a_inf = law.at_infinity();
    const double mu = params.mu();
    const double g_lo = params.g_minus();
    const double g_hi = params.g_plus();

    std::vector<double> xs(grid.size());
    std::vector<double> p(grid.size());
    for (int j = 0; j <= grid.cells; ++j) {
        xs[j] = grid.x(j);
        p[j] = params.p(xs[j]);
    }
    const auto p_x = d1(p, h);
    const double p0 = p[0];

    double gx_max = 0.0;  // sup |g_x|, used by the transient bound
    auto vs = params.v_samples();
    for (double v : vs) {
        std::vector<double> g(grid.size());
        for (int j = 0; j <= grid.cells; ++j) g[j] = params.g(xs[j], v);
        const auto gx = d1(g, h);
        const auto gxx = d2(g, h);
        for (int j = 0; j <= grid.cells; ++j) {
            cert.gx_over_g = std::max(cert.gx_over_g, std::abs(gx[j] / g[j]));
            cert.q_over_g = std::max(cert.q_over_g, std::abs((-gxx[j] + p_x[j]) / g[j]));
            gx_max = std::max(gx_max, std::abs(gx[j]));
        }
        const double z0 = -(law(v) - p0) / g[0] - gx[0] / g[0];
        cert.z_boundary = std::max(cert.z_boundary, std::abs(z0));
        if (v == vs.back()) {
            // alpha(infinity) paired with the largest sampled g.
            const double zinf = -(a_inf - p0) / g[0] - gx[0] / g[0];
            cert.z_boundary = std::max(cert.z_boundary, std::abs(zinf));
        }
    }

    std::vector<double> log_u(init.u.size());
    for (std::size_t j = 0; j < init.u.size(); ++j) log_u[j] = std::log(init.u[j]);
    for (double z : d1(log_u, h)) cert.z_initial = std::max(cert.z_initial, std::abs(z));

    cert.M = (cert.z_boundary + cert.z_initial + L * cert.q_over_g) * std::exp(L * cert.gx_over_g);
    cert.log_M1 = cert.M * L;
    cert.log_M3 = cert.log_M1;
    cert.t_valid = L / g_lo;

    const double first = init.v > 0.0 ? std::log(init.w / init.v) : -kInf;
    const double second = a0 + mu > 0.0 ? cert.log_M1 + std::log((a0 + mu) / g_lo) : -kInf;
    cert.log_M2 = std::max(first, second);
    if (cert.log_M2 == -kInf) {
        cert.reason = "M2 undefined: v(0)=0 and alpha(0)+mu <= 0";
        return cert;
    }

    cert.gamma = std::min(0.5, mu / (2.0 * std::abs(a_inf)));
    const double mu1 = mu + cert.gamma * a_inf;
    const double tv = cert.t_valid;

    // Certified bound on w: before t_valid by the growth rate alpha(0), after by w <= M2 v_bar.
    double log_w_max = std::log(init.w) + std::max(a0, 0.0) * tv;
    if (a0 > 0.0) {
        const double v_bar = bisect([&](double v) { return law(v); }, 0.0,
                                    [&] {
                                        double hi = law.scale();
                                        for (int i = 0; i < 60 && law(hi) > 0.0; ++i) hi *= 2.0;
                                        return hi;
                                    }(),
                                    1e-12);
        log_w_max = std::max(log_w_max, cert.log_M2 + std::log(v_bar));
    }
    const double log_C = cert.log_M3 + std::log(g_hi) + (1.0 - cert.gamma) * log_w_max;

    // Transient bound on v/w^gamma at t_valid.
    double sup_u0 = 0.0;
    for (std::size_t j = 1; j < init.u.size(); ++j) sup_u0 = std::max(sup_u0, init.u[j]);
    const double p_max = *std::max_element(p.begin(), p.end());
    const double log_u_tr =
        std::max(safe_log(sup_u0), std::log(init.w) + std::max(a0, 0.0) * tv) + (p_max + gx_max) * tv;
    const double log_v_tr = log_add(safe_log(init.v), std::log(g_hi) + log_u_tr + std::log(tv));
    const double log_R0 = log_v_tr - cert.gamma * (std::log(init.w) + a_inf * tv);
    cert.log_M4 = std::max(log_R0, log_C - std::log(mu1));

    cert.available = std::isfinite(cert.M) && std::isfinite(cert.log_M1) &&
                     std::isfinite(cert.log_M2) && std::isfinite(cert.log_M4);
    if (!cert.available) cert.reason = "certificate overflowed";
    return cert;
}

BoundsReport check_bounds(const PdeTrajectory& traj, const BoundsCertificate& cert) {
    BoundsReport report;
    if (!cert.available) return report;
    auto check = [&](double t, const char* which, double lhs_log, double rhs_log) {
        const double slack = 1e-12 * std::max(1.0, std::abs(rhs_log));
        if (lhs_log > rhs_log + slack) {
            report.violations.push_back({t, which, lhs_log - rhs_log});
        }
    };
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < cert.t_valid) continue;
        ++report.checked;
        const double lw = safe_log(traj.w[i]);
        const double lv = safe_log(traj.v[i]);
        check(t, "M1", lw, cert.log_M1 + safe_log(traj.u_min[i]));
        check(t, "M2", lw, cert.log_M2 + lv);
        check(t, "M3", safe_log(traj.u_max[i]), cert.log_M3 + lw);
        check(t, "M4", lv, cert.log_M4 + cert.gamma * lw);
    }
    return report;
}

}  // namespace celldiff
