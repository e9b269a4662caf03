#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "celldiff/config.hpp"
#include "celldiff/errors.hpp"
#include "celldiff/steady_state.hpp"
#include "celldiff/transport.hpp"

using namespace celldiff;
using Catch::Approx;

namespace {

ContinuousModelParams persistence_model() {
    ContinuousModelSpec s;
    s.a = CoefficientTable({0.0, 1.0}, {0.75, 0.6});
    s.p = CoefficientTable({0.0, 1.0}, {1.0, 1.5});
    return ContinuousModelParams(s);
}

}  // namespace

TEST_CASE("v-bar closed form and bisection", "[steady]") {
    const auto law = FeedbackLaw::true_data(0.75, 30.0, 1.28e-9);
    const auto r = solve_vbar(law);
    REQUIRE(std::holds_alternative<double>(r));
    CHECK(std::get<double>(r) == Approx(3.90625e8).epsilon(1e-14));
    CHECK(bisect_vbar(law) == Approx(0.5 / 1.28e-9).epsilon(1e-10));
}

TEST_CASE("no positive steady state when alpha(0) <= 0", "[steady]") {
    const auto law = FeedbackLaw::true_data(0.4, 30.0, 1.28e-9);
    const auto r = solve_vbar(law);
    REQUIRE(std::holds_alternative<NoPositiveSteadyState>(r));
    CHECK(std::get<NoPositiveSteadyState>(r).alpha_zero == Approx(-6.0));
    CHECK_THROWS_AS(bisect_vbar(law), DomainError);
    CHECK(std::holds_alternative<NoPositiveSteadyState>(
        solve_vbar(FeedbackLaw::true_data(0.5, 1.0, 1.0))));
}

TEST_CASE("generic law root", "[steady]") {
    const auto law = FeedbackLaw::generic([](double v) { return 1.0 - v; }, 10.0);
    const auto r = solve_vbar(law);
    REQUIRE(std::holds_alternative<double>(r));
    CHECK(std::get<double>(r) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bisection agrees with the closed form across parameters", "[steady][property]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> a(0.501, 1.0), lk(-12.0, 0.0), p(0.01, 50.0);
    for (int i = 0; i < 300; ++i) {
        const double aw = a(rng), k = std::pow(10.0, lk(rng));
        const auto law = FeedbackLaw::true_data(aw, p(rng), k);
        REQUIRE(bisect_vbar(law) == Approx((2 * aw - 1) / k).epsilon(1e-10));
    }
}

TEST_CASE("u-bar at x* for the table1 preset mapping", "[steady]") {
    const auto m = discrete_to_continuous(load_table1(), 100);
    const double mu = 0.6925, k = 1.28e-9, aw = 0.77, a_end = 0.605, p_end = 1.0;
    const double closed = (mu / (k * p_end)) * aw * (2 * aw - 1) / (2 * aw - a_end);
    CHECK(closed == Approx(2.406e8).epsilon(1e-3));
    CHECK(closed_form_u_end(m) == Approx(closed).epsilon(1e-14));

    const double vbar = (2 * aw - 1) / k;
    const double g_end = p_end * (2 * aw - a_end) / aw;
    CHECK(mu * vbar / g_end == Approx(closed).epsilon(1e-10));

    const Grid grid(100, 1.0, 7.0);
    const auto ss = steady_state(m, grid);
    CHECK(ss.u_bar.back() == Approx(closed).epsilon(1e-10));
}

TEST_CASE("constant coefficients give an exponential profile", "[steady]") {
    ContinuousModelSpec s;
    s.x_star = 2.0;
    s.k = 1e-6;
    s.p = CoefficientTable::constant(0.9, 0.0, 2.0);
    s.maturation = TabulatedMaturation::constant(1.8, 0.0, 2.0);
    s.alpha = FeedbackLaw::true_data(0.8, 1.0, 1e-6);
    const ContinuousModelParams m(s);
    const Grid grid(40, 0.0, 2.0);
    const auto ss = steady_state(m, grid);
    REQUIRE(ss.exists_positive);
    const double u_end = m.mu() * ss.v_bar / 1.8;
    for (int j = 0; j <= 40; ++j) {
        CHECK(ss.u_bar[j] == Approx(u_end * std::exp(-(0.9 / 1.8) * (2.0 - grid.x(j)))).epsilon(1e-12));
    }
    CHECK(ss.w_bar == ss.u_bar[0]);
}

TEST_CASE("Simpson profile converges at high order", "[steady]") {
    // g = 1 + x, p = 2: u(x) = u(x*) (1 + x) / (1 + x*).
    ContinuousModelSpec s;
    s.p = CoefficientTable::constant(2.0, 0.0, 1.0);
    s.maturation = FunctionMaturation{[](double x, double) { return 1.0 + x; }};
    s.alpha = FeedbackLaw::true_data(0.75, 1.0, 1e-9);
    const ContinuousModelParams m(s);
    std::vector<double> errs;
    for (int I : {4, 8, 16, 32}) {
        const Grid grid(I, 0.0, 1.0);
        const auto ss = steady_state(m, grid);
        double err = 0.0;
        for (int j = 0; j <= I; ++j) {
            const double exact = ss.u_bar[I] * (1.0 + grid.x(j)) / 2.0;
            err = std::max(err, std::abs(ss.u_bar[j] - exact) / exact);
        }
        errs.push_back(err);
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        CHECK(std::log2(errs[i - 1] / errs[i]) >= 2.0);
    }
}

TEST_CASE("positive steady state passes verification at I=200", "[steady]") {
    const auto m = persistence_model();
    const Grid grid(200, 0.0, 1.0);
    const auto ss = steady_state(m, grid);
    REQUIRE(ss.exists_positive);
    CHECK(ss.v_bar > 0.0);
    CHECK(ss.w_bar > 0.0);
    for (double u : ss.u_bar) CHECK(u > 0.0);
    const auto r = verify_steady(ss, m, grid);
    CHECK(r.passed);
    double pu = 0.0;
    for (int j = 0; j <= 200; ++j) pu = std::max(pu, m.p(grid.x(j)) * ss.u_bar[j]);
    CHECK(r.transport < 1e-3 * pu);
    CHECK(r.alpha_w < 1e-10 * r.algebraic_scale);
    CHECK(r.boundary < 1e-10 * ss.w_bar);
    CHECK(r.outflow < 1e-10 * m.mu() * ss.v_bar);
}

TEST_CASE("perturbed steady state fails verification", "[steady]") {
    const auto m = persistence_model();
    const Grid grid(200, 0.0, 1.0);
    auto ss = steady_state(m, grid);
    ss.v_bar *= 1.01;
    const auto r = verify_steady(ss, m, grid);
    CHECK(r.alpha_w > 1e-6 * r.algebraic_scale);
    CHECK_FALSE(r.passed);
}

TEST_CASE("trivial steady state has zero residuals", "[steady]") {
    ContinuousModelSpec s;
    s.a = CoefficientTable::constant(0.4, 0.0, 1.0);
    const ContinuousModelParams m(s);
    const Grid grid(50, 0.0, 1.0);
    const auto ss = steady_state(m, grid);
    CHECK_FALSE(ss.exists_positive);
    CHECK(ss.v_bar == 0.0);
    CHECK(ss.w_bar == 0.0);
    const auto r = verify_steady(ss, m, grid);
    CHECK(r.alpha_w == 0.0);
    CHECK(r.transport == 0.0);
    CHECK(r.boundary == 0.0);
    CHECK(r.outflow == 0.0);
}

double max_rel_gap(const SteadyState& a, const SteadyState& b) {
    double gap = std::abs(a.v_bar - b.v_bar) / b.v_bar;
    gap = std::max(gap, std::abs(a.w_bar - b.w_bar) / b.w_bar);
    for (std::size_t j = 0; j < a.u_bar.size(); ++j) {
        gap = std::max(gap, std::abs(a.u_bar[j] - b.u_bar[j]) / b.u_bar[j]);
    }
    return gap;
}

TEST_CASE("long simulation settles on the steady state", "[steady]") {
    const auto m = persistence_model();
    const Grid grid(200, 0.0, 1.0);
    RunOptions o;
    o.t_end = 400.0;
    o.snapshot_count = 2;
    o.series_stride = 1000;
    const auto f = run(m, grid, make_initial_state(m, grid, 1e5, 1e5), o).final_state;
    SteadyState sim;
    sim.v_bar = f.v;
    sim.w_bar = f.w;
    sim.u_bar = f.u;

    const auto fixed = steady_state(m, grid, ProfileMethod::SchemeFixedPoint);
    const auto quad = steady_state(m, grid);
    CHECK(max_rel_gap(sim, fixed) < 1e-8);
    CHECK(sim.v_bar == Approx(quad.v_bar).epsilon(1e-8));

    // The remaining gap to the continuous profile is the scheme's first-order error:
    // 1.7e-3 at I=200, halving with dx.
    const double gap200 = max_rel_gap(sim, quad);
    CHECK(gap200 < 2e-3);
    const Grid fine(400, 0.0, 1.0);
    const double gap400 = max_rel_gap(steady_state(m, fine, ProfileMethod::SchemeFixedPoint),
                                      steady_state(m, fine));
    CHECK(gap400 < 1e-3);
    CHECK(gap200 / gap400 == Approx(2.0).epsilon(0.05));
}

TEST_CASE("general boundary scales w-bar", "[steady]") {
    ContinuousModelSpec s;
    s.a = CoefficientTable({0.0, 1.0}, {0.75, 0.6});
    s.p = CoefficientTable({0.0, 1.0}, {1.0, 1.5});
    s.boundary = BoundaryMode::General;
    const ContinuousModelParams m(s);
    const Grid grid(100, 0.0, 1.0);
    const auto ss = steady_state(m, grid);
    CHECK(ss.w_bar == Approx(ss.u_bar[0] / m.boundary_factor(ss.v_bar)));
    CHECK(verify_steady(ss, m, grid).boundary < 1e-10 * ss.w_bar);
}
