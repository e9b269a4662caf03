#include "celldiff/hopf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "celldiff/errors.hpp"
#include "celldiff/numerics.hpp"

namespace celldiff {

namespace {
constexpr double kPi = std::numbers::pi;
}

HopfResult hopf_simple(double tau, double v_bar, double alpha_prime_abs) {
    if (!(v_bar > 0.0) || !(alpha_prime_abs >= 0.0)) {
        throw DomainError("hopf_simple: v_bar must be positive and |alpha'| nonnegative");
    }
    return hopf_simple(tau, v_bar * alpha_prime_abs);
}

HopfResult hopf_simple(double tau, double c) {
    if (!(tau > 0.0) || !(c >= 0.0)) {
        throw DomainError("hopf_simple: tau must be positive and c nonnegative");
    }
    HopfResult out;
    const double A = tau * c;
    if (A <= 1.0) {
        out.notes.push_back("A = tau c <= 1: no imaginary-axis crossing");
        return out;
    }
    auto solve_branch = [&](int k) {
        const double base = 2.0 * kPi * k;
        const double hi = base + kPi / 2.0;
        auto f = [&](double x) { return x - A * std::sin(x); };
        // On branch 0 the bracket stays clear of the trivial root x = 0.
        const double lo = k == 0 ? 1e-9 : base;
        const double x = bisect(f, lo, hi, 1e-15);
        const double omega = x / tau;
        const double mu = omega * omega / (c * std::cos(x));
        const DelayProblem dp{mu, tau, -mu * c};
        const double res = std::abs(char_eval(dp, cplx(0.0, omega)));
        out.points.push_back({omega, mu, k, res});
    };

    // Branch 0 needs 1 < A < pi/2; branch k >= 1 needs A > 2 k pi + pi/2.
    if (A < kPi / 2.0) {
        solve_branch(0);
    } else if (A == kPi / 2.0) {
        out.notes.push_back("branch 0 omitted: A sits exactly at the threshold pi/2");
    } else {
        std::ostringstream msg;
        msg << "branch 0 absent: A=" << A
            << " exceeds pi/2, so x = A sin x has no root in (0, pi/2]";
        out.notes.push_back(msg.str());
    }
    for (int k = 1; 2.0 * kPi * k + kPi / 2.0 <= A; ++k) {
        if (A == 2.0 * kPi * k + kPi / 2.0) {
            out.notes.push_back("branch " + std::to_string(k) + " omitted: A sits at its threshold");
            continue;
        }
        solve_branch(k);
    }
    return out;
}

std::variant<HeavisideHopf, OutOfRange> heaviside_hopf(double a_w, double B, double p_w,
                                                       double omega) {
    if (!(a_w > 0.5 && a_w <= 1.0) || !(B > 0.0) || !(p_w > 0.0) || !(omega > 0.0)) {
        throw DomainError("heaviside_hopf: needs 1/2 < a_w <= 1 and positive B, p_w, omega");
    }
    const double c = omega / (p_w * (2.0 * a_w - 1.0) * B);
    if (c > 1.0) return OutOfRange{c};
    HeavisideHopf h;
    h.c = c;
    h.theta = kPi + std::asin(c);
    h.delta = h.theta * p_w / omega;
    const double lhs = (omega * omega / (p_w * p_w)) * (2.0 * a_w / (2.0 * a_w - 1.0));
    h.mu = p_w * lhs / (1.0 + B * (1.0 - std::cos(h.theta)));
    return h;
}

ReducedProblem heaviside_problem(double a_w, double B, double p_w, const HeavisideHopf& h) {
    return ReducedProblem::from_model(h.mu, a_w, p_w, SegmentProfile::step(B, 0.0, h.delta),
                                      h.delta);
}

std::vector<CrossingBracket> imaginary_crossing_scan(const CharProblem& problem, double omega_lo,
                                                     double omega_hi, int steps, double tol) {
    if (!(omega_lo > 0.0) || !(omega_hi > omega_lo) || steps < 2) {
        throw DomainError("imaginary_crossing_scan: needs 0 < omega_lo < omega_hi and steps >= 2");
    }
    auto rel = [&](double w) {
        const auto v = char_G(problem, cplx(0.0, w));
        return v.scale > 0.0 ? std::abs(v.value) / v.scale : std::abs(v.value);
    };
    const double dw = (omega_hi - omega_lo) / steps;
    std::vector<double> r(steps + 1);
    for (int i = 0; i <= steps; ++i) r[i] = rel(omega_lo + i * dw);
    std::vector<CrossingBracket> out;
    for (int i = 0; i <= steps; ++i) {
        const bool left_ok = i == 0 || r[i] <= r[i - 1];
        const bool right_ok = i == steps || r[i] <= r[i + 1];
        if (!left_ok || !right_ok) continue;
        const double lo = omega_lo + std::max(0, i - 1) * dw;
        const double hi = omega_lo + std::min(steps, i + 1) * dw;
        const double w = golden_min(rel, lo, hi, 1e-14 * hi);
        const double res = rel(w);
        if (res < tol) out.push_back({lo, hi, w, res});
    }
    return out;
}

}  // namespace celldiff
