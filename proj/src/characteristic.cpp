#include "celldiff/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celldiff/errors.hpp"
#include "celldiff/grid.hpp"

namespace celldiff {

namespace {

double positive_vbar(const ContinuousModelParams& params) {
    const auto root = solve_vbar(params.alpha_law());
    if (const auto* none = std::get_if<NoPositiveSteadyState>(&root)) {
        throw DomainError("characteristic equation needs a positive steady state; alpha(0)=" +
                          std::to_string(none->alpha_zero));
    }
    return std::get<double>(root);
}

// Cumulative int_{x_0}^{x_i} f over uniform nodes, Simpson per interval with midpoints.
std::vector<double> cumulative(const std::function<double(double)>& f, double x0, double h, int n) {
    std::vector<double> out(n + 1, 0.0);
    double left = f(x0);
    for (int i = 0; i < n; ++i) {
        const double a = x0 + i * h;
        const double right = f(a + h);
        out[i + 1] = out[i] + (h / 6.0) * (left + 4.0 * f(a + 0.5 * h) + right);
        left = right;
    }
    return out;
}

double simpson_weight(std::size_t i, std::size_t n_nodes, double h) {
    if (i == 0 || i + 1 == n_nodes) return h / 3.0;
    return (i % 2 ? 4.0 : 2.0) * h / 3.0;
}

void check_panels(int panels) {
    if (panels < 1) throw ConfigError("characteristic equation needs at least one Simpson panel");
}

Grid analysis_grid(const ContinuousModelParams& params, int panels) {
    check_panels(panels);
    return Grid(2 * panels, params.x_begin(), params.x_star());
}

}  // namespace

DelayProblem DelayProblem::from_model(const ContinuousModelParams& params, int panels) {
    const double v_bar = positive_vbar(params);
    const Grid grid = analysis_grid(params, panels);
    const auto lam = cumulative([&](double x) { return 1.0 / params.g(x, v_bar); },
                                grid.x_begin, grid.dx(), grid.cells);
    return DelayProblem{params.mu(), lam.back(),
                        params.mu() * v_bar * params.alpha_law().derivative(v_bar)};
}

double SegmentProfile::operator()(double x) const {
    for (const auto& s : segments) {
        if (x >= s.x0 && x <= s.x1) {
            return s.b0 + (s.b1 - s.b0) * (x - s.x0) / (s.x1 - s.x0);
        }
    }
    return 0.0;
}

double SegmentProfile::l1_norm() const {
    double total = 0.0;
    for (const auto& s : segments) {
        const double len = s.x1 - s.x0;
        if (s.b0 * s.b1 >= 0.0) {
            total += 0.5 * len * std::abs(s.b0 + s.b1);
        } else {
            // Linear segment crossing zero: two triangles.
            const double t = s.b0 / (s.b0 - s.b1);
            total += 0.5 * len * (t * std::abs(s.b0) + (1.0 - t) * std::abs(s.b1));
        }
    }
    return total;
}

SegmentProfile SegmentProfile::step(double B, double y_star, double x_star) {
    if (!(x_star > y_star)) throw ConfigError("step profile needs y* < x*");
    return SegmentProfile{{{y_star, x_star, B, B}}};
}

SegmentProfile SegmentProfile::excess(const CoefficientTable& p, double p_w) {
    SegmentProfile out;
    const auto n = p.nodes();
    const auto v = p.values();
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        out.segments.push_back({n[i], n[i + 1], (v[i] - p_w) / p_w, (v[i + 1] - p_w) / p_w});
    }
    return out;
}

ReducedProblem ReducedProblem::from_model(double mu, double a_w, double p_w, SegmentProfile b,
                                          double x_star) {
    if (!(a_w > 0.5 && a_w <= 1.0)) throw DomainError("reduced equation needs 1/2 < a_w <= 1");
    if (!(mu > 0.0) || !(p_w > 0.0)) throw DomainError("reduced equation needs mu, p_w > 0");
    return ReducedProblem{mu / (2.0 * a_w), p_w * mu * (2.0 * a_w - 1.0) / (2.0 * a_w), p_w, x_star,
                          std::move(b)};
}

TrueDataGeneralProblem TrueDataGeneralProblem::from_model(const ContinuousModelParams& params,
                                                          int panels) {
    const auto* t = params.alpha_law().true_data_params();
    if (!t) throw ConfigError("TrueData characteristic equation needs a TrueData alpha law");
    const double v_bar = positive_vbar(params);
    const Grid grid = analysis_grid(params, panels);
    TrueDataGeneralProblem out;
    out.mu = params.mu();
    out.k = t->k;
    out.a_w = t->a_w;
    out.p_w = t->p_w;
    out.h = grid.dx();
    for (int i = 0; i <= grid.cells; ++i) {
        const double x = grid.x(i);
        out.dgdv.push_back(params.dg_dv(x, v_bar));
        out.g.push_back(params.g(x, v_bar));
        out.p.push_back(params.p(x));
    }
    out.Lambda = cumulative([&](double x) { return 1.0 / params.g(x, v_bar); }, grid.x_begin,
                            grid.dx(), grid.cells);
    return out;
}

GeneralProblem GeneralProblem::from_model(const ContinuousModelParams& params, int panels) {
    const double v_bar = positive_vbar(params);
    const Grid grid = analysis_grid(params, panels);
    const auto ss = steady_profile(v_bar, params, grid, ProfileMethod::Quadrature);
    GeneralProblem out;
    out.mu = params.mu();
    out.alpha_prime = params.alpha_law().derivative(v_bar);
    out.w_bar = ss.w_bar;
    out.v_bar = v_bar;
    out.h = grid.dx();
    out.g0 = params.g(grid.x_begin, v_bar);
    out.p0 = params.p(grid.x_begin);
    const int n = grid.cells;
    std::vector<double> hu(n + 1);
    for (int i = 0; i <= n; ++i) hu[i] = params.dg_dv(grid.x(i), v_bar) * ss.u_bar[i];
    out.hu_end = hu[n];
    out.hu_prime.resize(n + 1);
    const double h = out.h;
    if (n >= 2) {
        for (int i = 1; i < n; ++i) out.hu_prime[i] = (hu[i + 1] - hu[i - 1]) / (2.0 * h);
        out.hu_prime[0] = (-3.0 * hu[0] + 4.0 * hu[1] - hu[2]) / (2.0 * h);
        out.hu_prime[n] = (3.0 * hu[n] - 4.0 * hu[n - 1] + hu[n - 2]) / (2.0 * h);
    }
    out.Lambda = cumulative([&](double x) { return 1.0 / params.g(x, v_bar); }, grid.x_begin, h, n);
    out.P = cumulative([&](double x) { return params.p(x) / params.g(x, v_bar); }, grid.x_begin, h,
                       n);
    return out;
}

CharValue char_G(const CharProblem& problem, cplx lambda) {
    const double r = std::abs(lambda);
    return std::visit(
        [&](const auto& pr) -> CharValue {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, DelayProblem>) {
                const cplx e = pr.A * std::exp(-pr.tau * lambda);
                return {lambda * lambda + pr.mu * lambda - e, r * r + pr.mu * r + std::abs(e)};
            } else if constexpr (std::is_same_v<T, ReducedProblem>) {
                const cplx z = lambda / pr.p_w;
                cplx integral = 0.0;
                double mag = 0.0;
                for (const auto& s : pr.b.segments) {
                    const double slope = (s.b1 - s.b0) / (s.x1 - s.x0);
                    const cplx part = std::exp(z * (s.x0 - pr.x_star)) *
                                      linear_exp_integral(s.b0, slope, z, s.x1 - s.x0);
                    integral += part;
                    mag += std::abs(part);
                }
                const cplx tail = (pr.D / pr.p_w) * lambda * integral;
                return {lambda * lambda + pr.C * lambda + pr.D + tail,
                        r * r + pr.C * r + pr.D + (pr.D / pr.p_w) * r * mag};
            } else if constexpr (std::is_same_v<T, GConstProblem>) {
                const double C = pr.mu / (2.0 * pr.a_w);
                const double K = C * (2.0 * pr.a_w - 1.0);
                const cplx z = lambda / pr.p_w;
                const auto nodes = pr.p.nodes();
                const auto vals = pr.p.values();
                const double x0 = nodes.front();
                const double L = nodes.back() - x0;
                cplx integral = 0.0;
                double mag = 0.0;
                for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
                    const double len = nodes[i + 1] - nodes[i];
                    const double slope = (vals[i + 1] - vals[i]) / len / pr.p_w;
                    const cplx part = std::exp(z * (nodes[i] - x0 - L)) *
                                      linear_exp_integral(vals[i] / pr.p_w, slope, z, len);
                    integral += part;
                    mag += std::abs(part);
                }
                const cplx boundary = pr.p_w * std::exp(-z * L);
                return {lambda * lambda + C * lambda + K * (boundary + lambda * integral),
                        r * r + C * r + K * (std::abs(boundary) + r * mag)};
            } else if constexpr (std::is_same_v<T, TrueDataGeneralProblem>) {
                const double c = pr.mu / pr.k * (2.0 * pr.a_w - 1.0);
                const std::size_t n = pr.g.size();
                const double lam_end = pr.Lambda.back();
                cplx integral = 0.0;
                double mag = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = simpson_weight(i, n, pr.h) * pr.dgdv[i] / (pr.g[i] * pr.g[i]);
                    const cplx term = w * (lambda - pr.p[i]) * std::exp(lambda * (pr.Lambda[i] - lam_end));
                    integral += term;
                    mag += std::abs(term);
                }
                const cplx e_end = std::exp(-lambda * lam_end);
                const double kk = pr.k / (2.0 * pr.a_w);
                const cplx rhs = c * (kk * (lambda - pr.p_w) * e_end + lambda * integral);
                return {lambda * (lambda + pr.mu) - rhs,
                        r * r + pr.mu * r + c * (kk * (r + pr.p_w) * std::abs(e_end) + r * mag)};
            } else {
                const std::size_t n = pr.Lambda.size();
                const double lam_end = pr.Lambda.back();
                const double p_end = pr.P.back();
                cplx integral = 0.0;
                double mag = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx term = simpson_weight(i, n, pr.h) * (-pr.hu_prime[i]) *
                                      std::exp(lambda * (pr.Lambda[i] - lam_end) + (p_end - pr.P[i]));
                    integral += term;
                    mag += std::abs(term);
                }
                const cplx stem =
                    pr.g0 * pr.alpha_prime * pr.w_bar * std::exp(p_end - lambda * lam_end);
                const cplx lhs = lambda * (lambda + pr.mu - pr.hu_end);
                return {lhs - stem - lambda * integral,
                        r * r + (pr.mu + std::abs(pr.hu_end)) * r + std::abs(stem) + r * mag};
            }
        },
        problem);
}

cplx char_eval(const CharProblem& problem, cplx lambda) {
    if (lambda == cplx(0.0, 0.0)) {
        throw DomainError("characteristic function is singular at lambda=0 (the 1/lambda term)");
    }
    return char_G(problem, lambda).value / lambda;
}

std::pair<cplx, cplx> quadratic_roots(double C, double D) {
    const double disc = C * C - 4.0 * D;
    if (disc < 0.0) {
        const double im = 0.5 * std::sqrt(-disc);
        return {cplx(-0.5 * C, im), cplx(-0.5 * C, -im)};
    }
    // Real pair: take the large root without cancellation, the small one from the product D.
    const double q = -0.5 * (C + std::sqrt(disc));
    return {cplx(q == 0.0 ? 0.0 : D / q, 0.0), cplx(q, 0.0)};
}

std::optional<double> rhp_modulus_bound(const CharProblem& problem) {
    // On Re >= 0 every delayed exponential has modulus <= 1, so |lambda|^2 <= b1 |lambda| + b0.
    auto root = [](double b1, double b0) { return 0.5 * b1 + std::sqrt(0.25 * b1 * b1 + b0); };
    return std::visit(
        [&](const auto& pr) -> std::optional<double> {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, DelayProblem>) {
                return root(0.0, std::abs(pr.A));
            } else if constexpr (std::is_same_v<T, ReducedProblem>) {
                return root(pr.C + pr.D / pr.p_w * pr.b.l1_norm(), pr.D);
            } else if constexpr (std::is_same_v<T, GConstProblem>) {
                const double C = pr.mu / (2.0 * pr.a_w);
                const double K = C * (2.0 * pr.a_w - 1.0);
                const auto nodes = pr.p.nodes();
                const auto vals = pr.p.values();
                double l1 = 0.0;
                for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
                    l1 += 0.5 * (nodes[i + 1] - nodes[i]) * (std::abs(vals[i]) + std::abs(vals[i + 1]));
                }
                return root(C + K * l1 / pr.p_w, K * pr.p_w);
            } else if constexpr (std::is_same_v<T, TrueDataGeneralProblem>) {
                const double c = pr.mu / pr.k * (2.0 * pr.a_w - 1.0);
                const std::size_t n = pr.g.size();
                double s1 = 0.0, s2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = simpson_weight(i, n, pr.h) * std::abs(pr.dgdv[i]) / (pr.g[i] * pr.g[i]);
                    s1 += w;
                    s2 += w * std::abs(pr.p[i]);
                }
                const double kk = pr.k / (2.0 * pr.a_w);
                const double a2 = 1.0 - c * s1;
                if (!(a2 > 0.0)) return std::nullopt;
                return root((pr.mu + c * kk + c * s2) / a2, c * kk * pr.p_w / a2);
            } else {
                const std::size_t n = pr.Lambda.size();
                const double p_end = pr.P.back();
                double K = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    K += simpson_weight(i, n, pr.h) * std::abs(pr.hu_prime[i]) * std::exp(p_end - pr.P[i]);
                }
                const double stem = std::abs(pr.g0 * pr.alpha_prime * pr.w_bar) * std::exp(p_end);
                return root(pr.mu + std::abs(pr.hu_end) + K, stem);
            }
        },
        problem);
}

double problem_scale(const CharProblem& problem) {
    return std::visit(
        [](const auto& pr) -> double {
            using T = std::decay_t<decltype(pr)>;
            if constexpr (std::is_same_v<T, DelayProblem>) {
                return std::max(pr.mu, 1.0);
            } else if constexpr (std::is_same_v<T, ReducedProblem>) {
                return std::max({2.0 * pr.C, pr.p_w, 1.0});
            } else if constexpr (std::is_same_v<T, GeneralProblem>) {
                return std::max({pr.mu, pr.p0, 1.0});
            } else {
                return std::max({pr.mu, pr.p_w, 1.0});
            }
        },
        problem);
}

}  // namespace celldiff
