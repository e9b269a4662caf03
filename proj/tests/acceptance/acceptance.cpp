// Acceptance checks. One PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion outside kKnownFailures passes and every criterion in it
// fails. A known failure that starts passing is reported as unexpected, so the list cannot go
// stale silently.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "celldiff/characteristic.hpp"
#include "celldiff/compartment.hpp"
#include "celldiff/config.hpp"
#include "celldiff/hopf.hpp"
#include "celldiff/roots.hpp"
#include "celldiff/scenarios.hpp"
#include "celldiff/steady_state.hpp"
#include "celldiff/transport.hpp"

using namespace celldiff;
namespace fs = std::filesystem;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 3 asks for a branch-0 Hopf point at A = 2 pi + 1.6. Branch 0 exists only for
// 1 < A < pi/2: on (0, pi/2] the equation x = A sin x has no root once A >= pi/2, and the
// first root beyond pi/2 has cos x < 0, which forces mu < 0. See README, "Known failure".
const std::set<int> kKnownFailures = {3};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------------------------------
// Independent helpers

// Root of x = A sin x on [lo, hi] by plain bisection.
double bisect_fixed(double A, double lo, double hi) {
    auto f = [A](double x) { return A * std::sin(x) - x; };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// lambda^2 + mu lambda - A e^{-lambda tau}
cd delay_G(double mu, double tau, double A, cd l) { return l * l + mu * l - A * std::exp(-tau * l); }

// Reduced equation with b = B on [0, delta], x* = delta, divided by lambda.
cd heaviside_F(double C, double D, double p_w, double B, double delta, cd l) {
    return l + C + D / l + D * B * (1.0 - std::exp(-l * delta / p_w)) / l;
}

// Ordinary least-squares slope of ln y on t over t >= t_from.
double fit_rate(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_from || !(y[i] > 0)) continue;
        const double ly = std::log(y[i]);
        n += 1;
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

int sign_changes(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    int changes = 0, prev = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i - 1] < t_from) continue;
        const double d = y[i] - y[i - 1];
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::runtime_error("missing column " + name);
    const auto c = static_cast<std::size_t>(it - t.header.begin());
    std::vector<double> out;
    for (const auto& row : t.rows) out.push_back(row.at(c));
    return out;
}

// Metric at the last full-length step; a final step shortened to land on t_end divides
// round-off by a tiny dt.
double last_full_step_metric(const std::vector<double>& metric, const std::vector<double>& dt) {
    std::size_t i = metric.size() - 1;
    if (i >= 1 && dt[i] < 0.5 * dt[i - 1]) --i;
    return metric[i];
}

// ---------------------------------------------------------------------------------------------
// Scenario suite, run once at defaults and shared by criteria 6, 8, 9 and 10.

struct Suite {
    fs::path root;
    std::map<std::string, OutputBundle> bundles;
    std::map<std::string, json> summaries;  // read back from summary.json

    const CsvTable& table(const std::string& scenario, const std::string& file) const {
        for (const auto& [name, t] : bundles.at(scenario).tables) {
            if (name == file) return t;
        }
        throw std::runtime_error(scenario + " has no " + file);
    }
};

const Suite& suite() {
    static const Suite s = [] {
        Suite out;
        out.root = fs::temp_directory_path() / "celldiff_acceptance";
        fs::remove_all(out.root);
        for (const auto& name : scenario_names()) {
            ScenarioConfig c;
            c.scenario = name;
            c.out_dir = out.root / name;
            auto b = build_scenario(c);
            write_bundle(b, false);
            out.summaries[name] = load_json(c.out_dir / "summary.json");
            out.bundles.emplace(name, std::move(b));
        }
        return out;
    }();
    return s;
}

// ---------------------------------------------------------------------------------------------

void criterion1(Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> aw_d(0.5, 1.0), lk(-10.0, -6.0), pw_d(1.0, 100.0),
        aend_d(0.0, 1.0), pend_d(0.5, 5.0), mu_d(0.1, 2.0);
    double worst_v = 0.0, worst_u = 0.0;
    for (int i = 0; i < 50; ++i) {
        double aw = aw_d(rng);
        while (!(aw > 0.5)) aw = aw_d(rng);
        const double k = std::pow(10.0, lk(rng)), p_w = pw_d(rng);
        const double a_end = aend_d(rng) * aw, p_end = pend_d(rng), mu = mu_d(rng);

        const double vbar = bisect_vbar(FeedbackLaw::true_data(aw, p_w, k));
        const double v_closed = (2 * aw - 1) / k;
        worst_v = std::max(worst_v, std::abs(vbar - v_closed) / v_closed);

        ContinuousModelSpec s;
        s.x_star = 1.0;
        s.k = k;
        s.mu = mu;
        s.a = CoefficientTable({0.0, 1.0}, {aw, a_end});
        s.p = CoefficientTable({0.0, 1.0}, {p_w, p_end});
        const ContinuousModelParams m(s);
        const auto ss = steady_state(m, Grid(20, 0.0, 1.0));
        const double u_closed = (mu / (k * p_end)) * aw * (2 * aw - 1) / (2 * aw - a_end);
        worst_u = std::max(worst_u, std::abs(ss.u_bar.back() - u_closed) / u_closed);
    }
    o.detail << "max rel err v-bar " << g(worst_v) << ", u-bar(x*) " << g(worst_u) << " (tol 1e-10)";
    o.require(worst_v < 1e-10, "v-bar");
    o.require(worst_u < 1e-10, "u-bar(x*)");
}

void criterion2(Outcome& o) {
    for (double A : {-1.0, -2.0}) {
        const auto r = rightmost_root(CharProblem{DelayProblem{1.0, 1.0, A}});
        o.require(r.rightmost.has_value(), "no root found for A=" + g(A));
        if (!r.rightmost) continue;
        const cd l = *r.rightmost;
        const double res = std::abs(delay_G(1.0, 1.0, A, l));
        o.detail << "A=" << g(A) << ": rightmost " << g(l.real()) << (l.imag() < 0 ? "" : "+")
                 << g(l.imag()) << "i, rhp " << r.rhp_count << ", |G| " << g(res) << "; ";
        o.require(res < 1e-10, "residual");
        if (A == -1.0) o.require(l.real() < 0.0 && r.rhp_count == 0, "A=-1 stable");
        else o.require(r.rhp_count >= 1 && l.real() > 0.0, "A=-2 unstable");
    }
}

void criterion3(Outcome& o) {
    auto check_point = [&](double A, const HopfPoint& h) {
        const double mu = h.mu, c = A, om = h.omega;
        const cd l(0.0, om);
        const double F = std::abs(delay_G(mu, 1.0, -mu * c, l) / l);
        const int k = h.branch;
        const bool in_branch = k == 0 ? (om > 0 && om < kPi / 2)
                                      : (om > 2 * kPi * k && om <= 2 * kPi * k + kPi / 2);
        const double oracle = bisect_fixed(A, k == 0 ? 1e-12 : 2 * kPi * k + 1e-12,
                                           2 * kPi * k + kPi / 2);
        const bool ok = in_branch && mu > 0 && F < 1e-8 && std::abs(om - oracle) < 1e-9;
        o.detail << "A=" << g(A) << " k=" << k << ": tau*omega " << g(om) << ", mu " << g(mu)
                 << ", |F| " << g(F) << (ok ? "" : " (bad)") << "; ";
        return ok;
    };
    for (double A : {1.1, 1.3, 1.5}) {
        bool found = false;
        for (const auto& h : hopf_simple(1.0, A).points) {
            if (h.branch == 0) found = check_point(A, h);
        }
        o.require(found, "branch 0 at A=" + g(A));
    }
    const double A = 2 * kPi + 1.6;
    const auto r = hopf_simple(1.0, A);
    bool k0 = false, k1 = false;
    for (const auto& h : r.points) {
        const bool ok = check_point(A, h);
        if (h.branch == 0) k0 = ok;
        if (h.branch == 1) k1 = ok;
    }
    o.require(k1, "branch 1 at A=2pi+1.6");
    o.require(k0, "branch 0 at A=2pi+1.6 (none exists: A >= pi/2)");
}

void criterion4(Outcome& o) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> e(-4.0, 4.0);
    double worst_re = -1e300, worst_res = 0.0;
    int argument_checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double C = std::pow(10.0, e(rng)), D = std::pow(10.0, e(rng));
        const auto [a, b] = quadratic_roots(C, D);
        for (cd l : {a, b}) {
            worst_re = std::max(worst_re, l.real() / std::max(1.0, std::abs(l)));
            worst_res = std::max(worst_res, std::abs(l * l + C * l + D) / (std::abs(l * l) + C * std::abs(l) + D));
        }
        if (i % 20 == 0) {
            // Second route: no zeros in a right half-disc box bounded by the Rouche radius.
            const double R = 2.0 * (C + std::sqrt(D)) + 1.0;
            const auto w = winding_number(CharProblem{ReducedProblem{C, D, 1.0, 1.0, SegmentProfile{}}},
                                          Box{1e-9 * R, R, -R, R});
            o.require(w.has_value() && *w == 0, "argument principle count");
            ++argument_checked;
        }
    }
    o.detail << "max Re/|l| " << g(worst_re) << ", max rel residual " << g(worst_res) << ", "
             << argument_checked << " contour counts; ";
    o.require(worst_re < 0.0, "negative real parts");
    o.require(worst_res < 1e-12, "roots satisfy the quadratic");

    ContinuousModelSpec s;
    s.x_star = 0.5;
    s.a = CoefficientTable::constant(0.75, 0.0, 0.5);
    s.p = CoefficientTable::constant(1.0, 0.0, 0.5);
    const ContinuousModelParams m(s);
    const Grid grid(100, 0.0, 0.5);
    RunOptions opt;
    opt.t_end = 300.0;
    opt.snapshot_count = 0;
    const auto tr = run(m, grid, make_initial_state(m, grid, 1e5, 1e5), opt);
    const double metric = last_full_step_metric(tr.metric, tr.dt);
    o.detail << "simulation (x*=0.5, a=0.75, p=1, 300 days) metric " << g(metric) << " (tol 1e-6)";
    o.require(metric < 1e-6, "simulation metric");
}

void criterion5(Outcome& o) {
    const double a_w = 0.75, B = 50.0, p_w = 30.0, omega = 30.0;
    const auto r = heaviside_hopf(a_w, B, p_w, omega);
    o.require(std::holds_alternative<HeavisideHopf>(r), "construction in range");
    if (!std::holds_alternative<HeavisideHopf>(r)) return;
    const auto h = std::get<HeavisideHopf>(r);
    const double C = h.mu / (2 * a_w), D = p_w * h.mu * (2 * a_w - 1) / (2 * a_w);
    const double F = std::abs(heaviside_F(C, D, p_w, B, h.delta, cd(0.0, omega)));
    o.detail << "delta " << g(h.delta) << ", mu " << g(h.mu) << ", |F(i omega)| " << g(F) << "; ";
    o.require(std::abs(h.delta - 3.1816) < 5e-5, "delta ~ 3.1816");
    o.require(std::abs(h.mu - 0.8914) < 5e-5, "mu ~ 0.8914");
    o.require(F < 1e-8, "|F| < 1e-8");

    const auto br = imaginary_crossing_scan(heaviside_problem(a_w, B, p_w, h), 15.0, 45.0, 2000);
    bool bracketed = false;
    for (const auto& b : br) {
        if (b.omega_lo <= omega && omega <= b.omega_hi) {
            bracketed = true;
            o.detail << "scan bracket [" << g(b.omega_lo) << ", " << g(b.omega_hi) << "]";
        }
    }
    o.require(bracketed, "scan brackets omega");
}

void criterion6(Outcome& o) {
    const auto& s = suite();
    std::size_t steps = 0;
    double worst = 0.0;
    for (const auto& [name, sum] : s.summaries) {
        if (!sum.contains("steps")) continue;
        steps += sum["steps"].get<std::size_t>();
        worst = std::max(worst, sum["max_balance_residual"].get<double>());
    }
    o.detail << "scenarios: " << steps << " steps, max residual " << g(worst) << "; ";
    o.require(worst < 1e-12, "scenario residual");

    // Compartment model, explicit terminal death, balance recomputed from consecutive states.
    const auto table = load_table1();
    CompartmentState c0;
    c0.u.assign(table.n(), 0.0);
    c0.u.front() = 1e5;
    DiscreteOptions d;
    d.t_end = 200.0;
    const auto tr = integrate_discrete(table, c0, d);
    double worst_c = 0.0;
    const std::size_t n = table.n();
    for (std::size_t k = 1; k < tr.states.size(); ++k) {
        const auto& u0 = tr.states[k - 1].u;
        const auto& u1 = tr.states[k].u;
        const double dt = tr.times[k] - tr.times[k - 1];
        double change = 0.0, source = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            change += u1[i] - u0[i];
            scale += std::abs(u1[i] - u0[i]);
            if (i + 1 < n) {
                source += dt * (table.p()[i] - table.d()[i]) * u0[i];
                scale += dt * (table.p()[i] + table.d()[i]) * u0[i];
            } else {
                source -= dt * table.d()[i] * u0[i];
                scale += dt * table.d()[i] * u0[i];
            }
        }
        if (scale > 0) worst_c = std::max(worst_c, std::abs(change - source) / scale);
    }
    o.detail << "compartment: " << tr.steps << " steps, max residual " << g(worst_c);
    o.require(tr.states.size() == tr.steps + 1, "every compartment step recorded");
    o.require(worst_c < 1e-12, "compartment residual");
    o.require(steps + tr.steps >= 10000, ">= 1e4 steps");
}

void criterion7(Outcome& o) {
    const auto table = load_table1();
    const int I = static_cast<int>(table.n()) - 2;
    const auto m = discrete_to_continuous(table, I);
    const Grid grid(I, m.x_begin(), m.x_star());
    RunOptions opt;
    opt.t_end = 500.0;
    opt.keep_dts = true;
    opt.snapshot_count = 0;
    const auto pde = run(m, grid, make_initial_state(m, grid, 1e5, 0.0, InitialDensity{0.0}), opt);

    CompartmentState c0;
    c0.u.assign(table.n(), 0.0);
    c0.u.front() = 1e5;
    DiscreteOptions d;
    d.t_end = opt.t_end;
    d.matched_dts = pde.all_dts;
    d.terminal = TerminalDeath::Implicit;
    const auto disc = integrate_discrete(table, c0, d);

    o.require(disc.times.size() == pde.times.size(), "aligned records");
    double dev = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < std::min(disc.times.size(), pde.times.size()); ++i) {
        o.require(std::abs(disc.times[i] - pde.times[i]) <= 1e-9 * (1 + pde.times[i]), "aligned times");
        dev = std::max(dev, std::abs(disc.states[i].u.back() - pde.v[i]));
        vmax = std::max(vmax, std::abs(pde.v[i]));
    }
    o.detail << "I=" << I << ", " << pde.steps << " matched steps, sup |dv|/sup |v| " << g(dev / vmax)
             << " (tol 1e-6)";
    o.require(dev / vmax < 1e-6, "deviation");
}

void criterion8(Outcome& o) {
    const auto& s = suite();
    const auto& t = s.table("extinction", "series.csv");
    const auto time = column(t, "t"), w = column(t, "w"), v = column(t, "v"), mass = column(t, "u_mass");
    const double t_end = time.back();
    const double rate = fit_rate(time, w, 0.75 * t_end);
    o.detail << "t_end " << g(t_end) << ", fitted rate " << g(rate) << " (target -6, 5%); ";
    o.require(std::abs(t_end - 5.0) < 1e-9, "5-day run");
    o.require(std::abs(rate + 6.0) < 0.05 * 6.0, "rate");
    bool mono = true;
    for (std::size_t i = 1; i < time.size(); ++i) {
        if (time[i - 1] < 0.5 * t_end) continue;
        mono = mono && w[i] <= w[i - 1] && v[i] <= v[i - 1] && mass[i] <= mass[i - 1];
    }
    o.detail << "monotone decay over t >= t_end/2: " << (mono ? "yes" : "no");
    o.require(mono, "monotone");
}

void criterion9(Outcome& o) {
    const auto& s = suite();
    const auto& t = s.table("persistence", "series.csv");
    const auto time = column(t, "t"), w = column(t, "w"), v = column(t, "v");
    const double half = 0.5 * time.back();
    double wmin = 1e300, vmin = 1e300;
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (time[i] < half) continue;
        wmin = std::min(wmin, w[i]);
        vmin = std::min(vmin, v[i]);
    }
    const auto& cert = s.summaries.at("persistence")["certificate"];
    const auto& viol = s.table("persistence", "bound_violations.csv");
    o.detail << "min w " << g(wmin) << ", min v " << g(vmin) << " over t >= " << g(half)
             << "; certificate checked " << cert["checked_times"] << " times, " << viol.rows.size()
             << " violations";
    o.require(wmin > 0 && vmin > 0, "positivity");
    o.require(cert["available"].get<bool>(), "certificate available");
    o.require(cert["checked_times"].get<int>() > 0, "bounds checked");
    o.require(viol.rows.empty() && cert["violations"].get<int>() == 0, "no violations");
}

void criterion10(Outcome& o) {
    const auto& s = suite();
    const auto& t = s.table("fig45-instab", "series.csv");
    const auto time = column(t, "t"), v = column(t, "v"), metric = column(t, "metric"),
               dt = column(t, "dt");
    const double half = 0.5 * time.back();
    const int changes = sign_changes(time, v, half);
    double mmin = 1e300;
    for (std::size_t i = 1; i < time.size(); ++i) {
        if (i + 1 == time.size() && dt[i] < 0.5 * dt[i - 1]) continue;  // shortened landing step
        if (time[i] >= half) mmin = std::min(mmin, metric[i]);
    }
    o.detail << "fig45: " << changes << " dv/dt sign changes, min metric " << g(mmin) << "; ";
    o.require(changes >= 3, "sign changes");
    o.require(mmin >= 1e-4, "metric floor");

    const auto& f = s.table("fig1-grids", "series_I100.csv");
    const double m100 = last_full_step_metric(column(f, "metric"), column(f, "dt"));
    o.detail << "fig1 I=100 horizon metric " << g(m100) << " (tol 1e-6)";
    o.require(m100 < 1e-6, "fig1 I=100 converges");
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
    };
    int unexpected = 0, passed = 0;
    for (const auto& [id, fn] : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool known = kKnownFailures.count(id) > 0;
        std::printf("%s criterion %d (%.1f s): %s%s\n", o.pass ? "PASS" : "FAIL", id, secs,
                    o.detail.str().c_str(),
                    known ? (o.pass ? " [listed as known failure but passed]" : " [known failure]") : "");
        std::fflush(stdout);
        if (o.pass) ++passed;
        if (o.pass == known) ++unexpected;
    }
    std::printf("%d/%zu criteria passed, %d unexpected result(s)\n", passed, criteria.size(), unexpected);
    return unexpected == 0 ? 0 : 1;
}
