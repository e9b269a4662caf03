#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "celldiff/hopf.hpp"

using namespace celldiff;
using Catch::Approx;

namespace {

// Plain bisection for x = A sin x on [lo, hi], used as an oracle.
double solve_fixed(double A, double lo, double hi) {
    auto f = [A](double x) { return A * std::sin(x) - x; };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("no crossing when A <= 1", "[hopf]") {
    CHECK(hopf_simple(1.0, 1.0).points.empty());
    CHECK(hopf_simple(2.0, 0.5).points.empty());
    CHECK(hopf_simple(1.0, 0.3).points.empty());
}

TEST_CASE("branch 0 for tau = 1, c = 1.2", "[hopf]") {
    const auto r = hopf_simple(1.0, 1.2);
    REQUIRE(r.points.size() == 1);
    const auto& h = r.points[0];
    const double x = solve_fixed(1.2, 1e-9, M_PI / 2);
    CHECK(h.branch == 0);
    CHECK(h.omega == Approx(x).epsilon(1e-10));
    CHECK(h.omega == Approx(1.027).epsilon(1e-3));
    const double mu = x * x / (1.2 * std::cos(x));
    CHECK(h.mu == Approx(mu).epsilon(1e-10));
    CHECK(h.mu == Approx(1.70).epsilon(3e-3));
    const CharProblem p = DelayProblem{h.mu, 1.0, -h.mu * 1.2};
    CHECK(std::abs(char_eval(p, cplx(0.0, h.omega))) < 1e-8);
    CHECK(h.residual < 1e-8);
}

TEST_CASE("three-argument form uses c = v-bar |alpha'|", "[hopf]") {
    const auto a = hopf_simple(0.5, 2.0e8, 1.2e-8);
    const auto b = hopf_simple(0.5, 2.4);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].omega == Approx(b.points[i].omega).epsilon(1e-12));
        CHECK(a.points[i].mu == Approx(b.points[i].mu).epsilon(1e-12));
    }
}

TEST_CASE("A = 2 pi + 1.6 has no positive branch-0 crossing", "[hopf]") {
    const double A = 2 * M_PI + 1.6;
    const auto r = hopf_simple(1.0, A);
    // On (0, pi/2] A sin x - x stays positive; its first root lies where cos x < 0.
    for (int i = 1; i <= 1000; ++i) {
        const double x = (M_PI / 2) * i / 1000.0;
        REQUIRE(A * std::sin(x) - x > 0.0);
    }
    const double x0 = solve_fixed(A, M_PI / 2, M_PI);
    CHECK(std::cos(x0) < 0.0);
    CHECK(x0 * x0 / (A * std::cos(x0)) < 0.0);  // mu would be negative

    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].branch == 1);
    const double x1 = solve_fixed(A, 2 * M_PI + 1e-12, 2 * M_PI + M_PI / 2);
    CHECK(r.points[0].omega == Approx(x1).epsilon(1e-10));
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("Hopf points satisfy both relations within their branch", "[hopf][property]") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> A(1.001, 60.0), tau(0.1, 5.0);
    int seen = 0;
    for (int i = 0; i < 300; ++i) {
        const double t = tau(rng), a = A(rng), c = a / t;
        for (const auto& h : hopf_simple(t, c).points) {
            ++seen;
            const double x = t * h.omega;
            REQUIRE(x > 2 * M_PI * h.branch);
            REQUIRE(x <= 2 * M_PI * h.branch + M_PI / 2 + 1e-12);
            REQUIRE(h.mu > 0.0);
            REQUIRE(std::abs(h.omega * h.omega - h.mu * c * std::cos(x)) <= 1e-8 * h.omega * h.omega);
            REQUIRE(std::abs(x - a * std::sin(x)) <= 1e-8 * x);
            REQUIRE(h.residual < 1e-8);
        }
    }
    CHECK(seen > 100);
}

TEST_CASE("branch count follows the thresholds", "[hopf]") {
    for (int k = 1; k <= 4; ++k) {
        const double thr = 2 * k * M_PI + M_PI / 2;
        const auto above = hopf_simple(1.0, thr + 0.01);
        REQUIRE_FALSE(above.points.empty());
        CHECK(above.points.back().branch == k);
        const auto below = hopf_simple(1.0, thr - 0.01);
        if (!below.points.empty()) CHECK(below.points.back().branch == k - 1);
    }
}

TEST_CASE("Heaviside construction at c = 1", "[hopf]") {
    const double a_w = 0.75, B = 50.0, p_w = 30.0;
    const double omega = p_w * (2 * a_w - 1) * B;
    const auto r = heaviside_hopf(a_w, B, p_w, omega);
    REQUIRE(std::holds_alternative<HeavisideHopf>(r));
    CHECK(std::get<HeavisideHopf>(r).theta == Approx(1.5 * M_PI).epsilon(1e-14));
    CHECK(std::get<HeavisideHopf>(r).c == Approx(1.0));
}

TEST_CASE("Heaviside example with omega = 30", "[hopf]") {
    const double a_w = 0.75, B = 50.0, p_w = 30.0, omega = 30.0;
    const auto r = heaviside_hopf(a_w, B, p_w, omega);
    REQUIRE(std::holds_alternative<HeavisideHopf>(r));
    const auto h = std::get<HeavisideHopf>(r);
    CHECK(h.c == Approx(0.04).epsilon(1e-14));
    const double theta = M_PI + std::asin(0.04);
    CHECK(h.theta == Approx(theta).epsilon(1e-14));
    CHECK(h.theta == Approx(3.18160).epsilon(1e-5));
    CHECK(h.delta == Approx(theta * p_w / omega).epsilon(1e-14));
    CHECK(h.delta == Approx(3.1816).epsilon(1e-4));
    const double mu = (omega * omega / (p_w * p_w)) * (2 * a_w / (2 * a_w - 1)) * p_w /
                      (1.0 + B * (1.0 - std::cos(theta)));
    CHECK(h.mu == Approx(mu).epsilon(1e-12));
    CHECK(h.mu == Approx(0.8914).epsilon(1e-4));

    const CharProblem p = heaviside_problem(a_w, B, p_w, h);
    CHECK(std::abs(char_eval(p, cplx(0.0, omega))) < 1e-8);
    CHECK(std::abs(char_eval(p, cplx(0.0, -omega))) < 1e-8);
}

TEST_CASE("Heaviside out of range", "[hopf]") {
    const auto r = heaviside_hopf(0.75, 50.0, 30.0, 800.0);
    REQUIRE(std::holds_alternative<OutOfRange>(r));
    CHECK(std::get<OutOfRange>(r).c == Approx(800.0 / 750.0));
    CHECK(std::holds_alternative<HeavisideHopf>(heaviside_hopf(0.75, 50.0, 30.0, 750.0)));
}

TEST_CASE("crossing scan recovers the delay Hopf frequency", "[hopf]") {
    const auto h = hopf_simple(1.0, 1.2).points.at(0);
    const CharProblem p = DelayProblem{h.mu, 1.0, -h.mu * 1.2};
    const auto br = imaginary_crossing_scan(p, 0.1, 5.0, 400);
    REQUIRE(br.size() == 1);
    CHECK(br[0].omega_lo <= h.omega);
    CHECK(br[0].omega_hi >= h.omega);
    CHECK(br[0].omega == Approx(h.omega).epsilon(1e-5));
}

TEST_CASE("stable reduced problem has no crossing", "[hopf]") {
    const CharProblem p = ReducedProblem::from_model(0.6925, 0.75, 30.0, SegmentProfile{}, 3.0);
    CHECK(imaginary_crossing_scan(p, 0.01, 100.0, 2000).empty());
}

TEST_CASE("crossing scan finds the Heaviside construction", "[hopf]") {
    const auto h = std::get<HeavisideHopf>(heaviside_hopf(0.75, 50.0, 30.0, 30.0));
    const CharProblem p = heaviside_problem(0.75, 50.0, 30.0, h);
    const auto br = imaginary_crossing_scan(p, 1.0, 60.0, 600);
    bool found = false;
    for (const auto& b : br) {
        if (b.omega_lo <= 30.0 && b.omega_hi >= 30.0) {
            found = true;
            CHECK(b.omega == Approx(30.0).epsilon(1e-4));
        }
    }
    CHECK(found);
}
