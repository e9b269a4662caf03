#include "celldiff/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "celldiff/bounds.hpp"
#include "celldiff/characteristic.hpp"
#include "celldiff/compartment.hpp"
#include "celldiff/errors.hpp"
#include "celldiff/hopf.hpp"
#include "celldiff/roots.hpp"
#include "celldiff/steady_state.hpp"
#include "celldiff/transport.hpp"

namespace celldiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBalanceTol = 1e-12;

double num(const json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_number()) {
        throw ConfigError(std::string("scenario parameter '") + key + "' must be a number");
    }
    return p[key].get<double>();
}

int integer(const json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_number_integer()) {
        throw ConfigError(std::string("scenario parameter '") + key + "' must be an integer");
    }
    return p[key].get<int>();
}

std::vector<double> num_list(const json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_array()) {
        throw ConfigError(std::string("scenario parameter '") + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& e : p[key]) {
        if (!e.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string text(const json& p, const char* key) {
    if (!p.contains(key) || !p[key].is_string()) {
        throw ConfigError(std::string("scenario parameter '") + key + "' must be a string");
    }
    return p[key].get<std::string>();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json box_json(const Box& b) { return json::array({b.re_min, b.re_max, b.im_min, b.im_max}); }

Box parse_box(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("box must be [re_min, re_max, im_min, im_max]");
    return Box{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

CsvTable trajectory_table(const PdeTrajectory& tr) {
    CsvTable t;
    t.header = {"t", "w", "v", "metric", "residual", "dt", "u_mass", "u_min", "u_max"};
    t.rows.reserve(tr.times.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        t.rows.push_back({tr.times[i], tr.w[i], tr.v[i], tr.metric[i], tr.residual[i], tr.dt[i],
                          tr.u_mass[i], tr.u_min[i], tr.u_max[i]});
    }
    return t;
}

CsvTable profile_table(const PdeState& s, const Grid& grid) {
    CsvTable t;
    t.header = {"x", "u"};
    for (int j = 0; j <= grid.cells; ++j) t.rows.push_back({grid.x(j), s.u[j]});
    return t;
}

// Metric at the horizon, skipping a final step shortened to land on t_end.
double horizon_metric(const PdeTrajectory& tr) {
    const std::size_t n = tr.metric.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    if (n >= 3 && tr.dt[n - 1] < 0.5 * tr.dt[n - 2]) return tr.metric[n - 2];
    return tr.metric[n - 1];
}

double min_metric_from(const PdeTrajectory& tr, double t_from) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        // Skip the shortened final step; its quotient is dominated by round-off.
        if (i + 1 == tr.times.size() && tr.dt[i] < 0.5 * tr.dt[i - 1]) continue;
        if (tr.times[i] >= t_from && std::isfinite(tr.metric[i])) m = std::min(m, tr.metric[i]);
    }
    return m;
}

double min_from(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_from) m = std::min(m, y[i]);
    }
    return m;
}

double max_from(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_from) m = std::max(m, y[i]);
    }
    return m;
}

bool non_increasing_from(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i - 1] >= t_from && y[i] > y[i - 1]) return false;
    }
    return true;
}

Series series_of(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
    return Series{std::move(name), x, y};
}

Series profile_series(std::string name, const PdeState& s, const Grid& grid) {
    Series out{std::move(name), {}, {}};
    for (int j = 0; j <= grid.cells; ++j) {
        out.x.push_back(grid.x(j));
        out.y.push_back(s.u[j]);
    }
    return out;
}

json trajectory_summary(const PdeTrajectory& tr) {
    return {{"steps", tr.steps},
            {"max_balance_residual", tr.max_residual},
            {"max_cfl_number", tr.max_theta},
            {"final_w", tr.final_state.w},
            {"final_v", tr.final_state.v},
            {"horizon_metric", finite_or_null(horizon_metric(tr))}};
}

PdeState perturbed_steady(const ContinuousModelParams& params, const Grid& grid, double perturbation) {
    const auto ss = steady_state(params, grid, ProfileMethod::SchemeFixedPoint);
    if (!ss.exists_positive) throw ConfigError("no positive steady state to perturb");
    PdeState s;
    s.w = ss.w_bar * (1.0 + perturbation);
    s.u = ss.u_bar;
    s.v = ss.v_bar;
    s.u[0] = params.boundary() == BoundaryMode::Simplified ? s.w : params.boundary_factor(s.v) * s.w;
    return s;
}

PdeState initial_from(const json& p, const ContinuousModelParams& params, const Grid& grid) {
    const std::string kind = text(p, "init");
    if (kind == "steady") return perturbed_steady(params, grid, num(p, "perturbation"));
    if (kind == "constant") {
        std::optional<InitialDensity> u0;
        if (p.contains("u0") && !p["u0"].is_null()) u0 = InitialDensity{num(p, "u0")};
        return make_initial_state(params, grid, num(p, "w0"), num(p, "v0"), u0);
    }
    throw ConfigError("init must be \"steady\" or \"constant\"");
}

// ---------------------------------------------------------------------------------------------

OutputBundle fig1_grids(const json& p) {
    OutputBundle b;
    const auto table = parse_discrete(load_json(preset_path(text(p, "preset"))));
    const double t_end = num(p, "t_end");
    const double w0 = num(p, "w0"), v0 = num(p, "v0"), u0 = num(p, "u0");
    const int stride = integer(p, "series_stride");
    std::vector<int> grids;
    for (double I : num_list(p, "grids")) grids.push_back(static_cast<int>(I));
    if (grids.empty()) throw ConfigError("fig1-grids: empty grid list");

    struct GridRun {
        int I;
        Grid grid;
        PdeTrajectory traj;
    };
    std::vector<std::future<GridRun>> runs;
    for (int I : grids) {
        runs.push_back(std::async(std::launch::async, [&, I] {
            const auto params = discrete_to_continuous(table, I);
            const Grid grid(I, params.x_begin(), params.x_star());
            const auto init = make_initial_state(params, grid, w0, v0, InitialDensity{u0});
            RunOptions o;
            o.t_end = t_end;
            o.series_stride = stride;
            o.snapshot_count = 0;
            return GridRun{I, grid, run(params, grid, init, o)};
        }));
    }

    // Continuous run on the compartment grid and the compartment model on the same dt sequence.
    const int I_cmp = static_cast<int>(table.n()) - 2;
    auto compare = std::async(std::launch::async, [&] {
        const auto params = discrete_to_continuous(table, I_cmp);
        const Grid grid(I_cmp, params.x_begin(), params.x_star());
        const auto init = make_initial_state(params, grid, w0, v0, InitialDensity{u0});
        RunOptions o;
        o.t_end = num(p, "compare_t_end");
        o.keep_dts = true;
        o.snapshot_count = 0;
        auto pde = run(params, grid, init, o);
        CompartmentState c0;
        c0.u.assign(table.n(), u0);
        c0.u.front() = w0;
        c0.u.back() = v0;
        DiscreteOptions d;
        d.t_end = o.t_end;
        d.matched_dts = pde.all_dts;
        d.terminal = TerminalDeath::Implicit;
        auto disc = integrate_discrete(table, c0, d);
        return std::make_pair(std::move(pde), std::move(disc));
    });

    std::vector<GridRun> done;
    for (auto& f : runs) done.push_back(f.get());
    auto [pde6, disc] = compare.get();

    json grid_summaries = json::array();
    double max_balance = 0.0;
    std::size_t steps = 0;
    LineChart v_chart{"Mature cells for several grids", "t [days]", "v [cells]", false, {}};
    LineChart m_chart{"Stability metric for several grids", "t [days]", "metric [1/day]", true, {}};
    LineChart prof_chart{"Terminal maturity profiles", "x", "u", true, {}};
    for (const auto& r : done) {
        const std::string tag = "I" + std::to_string(r.I);
        b.tables.emplace_back("series_" + tag + ".csv", trajectory_table(r.traj));
        b.tables.emplace_back("profile_" + tag + ".csv", profile_table(r.traj.final_state, r.grid));
        v_chart.series.push_back(series_of("I=" + std::to_string(r.I), r.traj.times, r.traj.v));
        m_chart.series.push_back(series_of("I=" + std::to_string(r.I), r.traj.times, r.traj.metric));
        prof_chart.series.push_back(profile_series("I=" + std::to_string(r.I), r.traj.final_state, r.grid));
        json s = trajectory_summary(r.traj);
        s["I"] = r.I;
        grid_summaries.push_back(s);
        max_balance = std::max(max_balance, r.traj.max_residual);
        steps += r.traj.steps;
    }

    // Sup-norm deviation of v over the matched step sequence.
    double dev = 0.0, vmax = 0.0;
    bool aligned = pde6.times.size() == disc.times.size();
    CsvTable cmp;
    cmp.header = {"t", "v_continuous", "v_compartment", "abs_deviation"};
    for (std::size_t i = 0; aligned && i < pde6.times.size(); ++i) {
        const double vc = disc.states[i].u.back();
        aligned = std::abs(disc.times[i] - pde6.times[i]) <= 1e-9 * (1.0 + pde6.times[i]);
        dev = std::max(dev, std::abs(pde6.v[i] - vc));
        vmax = std::max(vmax, std::abs(pde6.v[i]));
        cmp.rows.push_back({pde6.times[i], pde6.v[i], vc, std::abs(pde6.v[i] - vc)});
    }
    const double rel_dev = vmax > 0.0 ? dev / vmax : dev;
    b.tables.emplace_back("compare_I" + std::to_string(I_cmp) + ".csv", cmp);
    CsvTable comp;
    comp.header = {"t"};
    for (std::size_t i = 1; i <= table.n(); ++i) comp.header.push_back("u_" + std::to_string(i));
    comp.header.push_back("residual");
    for (std::size_t i = 0; i < disc.times.size(); ++i) {
        std::vector<double> row{disc.times[i]};
        row.insert(row.end(), disc.states[i].u.begin(), disc.states[i].u.end());
        row.push_back(disc.balance_residuals[i]);
        comp.rows.push_back(std::move(row));
    }
    b.tables.emplace_back("compartment.csv", comp);
    LineChart cmp_chart{"Continuous and compartment models on the compartment grid", "t [days]",
                        "v [cells]", false, {}};
    {
        Series a{"continuous", {}, {}}, c{"compartment", {}, {}};
        for (const auto& row : cmp.rows) {
            a.x.push_back(row[0]);
            a.y.push_back(row[1]);
            c.x.push_back(row[0]);
            c.y.push_back(row[2]);
        }
        cmp_chart.series = {a, c};
    }
    b.charts = {{"v_overlay.svg", v_chart},
                {"metric.svg", m_chart},
                {"profiles.svg", prof_chart},
                {"compare_I" + std::to_string(I_cmp) + ".svg", cmp_chart}};

    max_balance = std::max({max_balance, pde6.max_residual, disc.max_step_residual, disc.max_rhs_residual});
    steps += pde6.steps + disc.steps;

    const auto finest = std::max_element(done.begin(), done.end(),
                                         [](const GridRun& a, const GridRun& c) { return a.I < c.I; });
    const double finest_metric = horizon_metric(finest->traj);
    const double dev_tol = num(p, "compare_tol");
    const double conv_tol = num(p, "converge_tol");
    const bool cmp_ok = aligned && rel_dev < dev_tol;
    const bool conv_ok = finest_metric < conv_tol;
    const bool bal_ok = max_balance < kBalanceTol;

    b.summary = {{"grids", grid_summaries},
                 {"mu", table.d().back()},
                 {"k", table.k()},
                 {"compare",
                  {{"I", I_cmp},
                   {"t_end", num(p, "compare_t_end")},
                   {"steps", pde6.steps},
                   {"aligned", aligned},
                   {"relative_sup_deviation", rel_dev},
                   {"tolerance", dev_tol},
                   {"passed", cmp_ok}}},
                 {"convergence",
                  {{"I", finest->I}, {"horizon_metric", finite_or_null(finest_metric)},
                   {"tolerance", conv_tol}, {"passed", conv_ok}}},
                 {"max_balance_residual", max_balance},
                 {"steps", steps},
                 {"assertion", "compartment grid matches the compartment model; finest grid converges; "
                               "balance residual below 1e-12"},
                 {"passed", cmp_ok && conv_ok && bal_ok}};
    return b;
}

// Shared body of the two instability scenarios.
OutputBundle instability(const json& p, const ContinuousModelParams& params, const Grid& grid,
                         json linearization) {
    OutputBundle b;
    const auto init = initial_from(p, params, grid);
    RunOptions o;
    o.t_end = num(p, "t_end");
    o.series_stride = integer(p, "series_stride");
    o.snapshot_count = 0;
    const auto tr = run(params, grid, init, o);

    const double half = init.t + 0.5 * (o.t_end - init.t);
    const int changes = derivative_sign_changes(tr.times, tr.v, half);
    const double min_metric = min_metric_from(tr, half);
    const int need_changes = integer(p, "min_sign_changes");
    const double metric_floor = num(p, "metric_floor");
    const bool osc_ok = changes >= need_changes && min_metric >= metric_floor;
    const bool bal_ok = tr.max_residual < kBalanceTol;

    b.tables.emplace_back("series.csv", trajectory_table(tr));
    b.tables.emplace_back("profile.csv", profile_table(tr.final_state, grid));
    b.charts = {
        {"v.svg", LineChart{"Mature cells", "t [days]", "v [cells]", false,
                            {series_of("v", tr.times, tr.v)}}},
        {"w.svg", LineChart{"Stem cells", "t [days]", "w [cells]", true,
                            {series_of("w", tr.times, tr.w)}}},
        {"metric.svg", LineChart{"Stability metric", "t [days]", "metric [1/day]", true,
                                 {series_of("metric", tr.times, tr.metric)}}},
        {"profile.svg", LineChart{"Terminal maturity profile", "x", "u", true,
                                  {profile_series("u", tr.final_state, grid)}}},
    };
    json s = trajectory_summary(tr);
    s["I"] = grid.cells;
    s["t_end"] = o.t_end;
    s["mu"] = params.mu();
    s["mu_note"] = "default mu is the terminal death rate d_8 = 0.6925 of the table1 preset";
    s["init"] = p["init"];
    s["sign_changes_latter_half"] = changes;
    s["min_metric_latter_half"] = finite_or_null(min_metric);
    s["min_sign_changes"] = need_changes;
    s["metric_floor"] = metric_floor;
    s["v_range_latter_half"] = {min_from(tr.times, tr.v, half), max_from(tr.times, tr.v, half)};
    s["linearization"] = std::move(linearization);
    s["max_balance_residual"] = tr.max_residual;
    s["assertion"] = "sustained oscillation in the latter half: dv/dt sign changes and a metric "
                     "bounded away from zero; balance residual below 1e-12";
    s["passed"] = osc_ok && bal_ok;
    b.summary = s;
    return b;
}

json linearization_report(const CharProblem& problem, const std::optional<Box>& box) {
    const auto rep = rightmost_root(problem, box);
    json roots = json::array();
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        roots.push_back({rep.roots[i].real(), rep.roots[i].imag(), rep.residuals[i]});
    }
    json j = {{"box", box_json(rep.box)},
              {"zeros_in_box", rep.count},
              {"rhp_count", rep.rhp_count},
              {"roots", roots},
              {"notes", rep.notes}};
    if (const auto rho = rhp_modulus_bound(problem)) j["rhp_modulus_bound"] = *rho;
    if (rep.rightmost) j["rightmost"] = {rep.rightmost->real(), rep.rightmost->imag()};
    return j;
}

OutputBundle fig23_instab(const json& p) {
    const double x_star = num(p, "x_star"), y_star = num(p, "y_star"), ramp = num(p, "ramp");
    const double p_w = num(p, "p_w"), B = num(p, "B");
    if (!(y_star - ramp > 0.0 && y_star < x_star && ramp > 0.0)) {
        throw ConfigError("fig23-instab: need 0 < y_star - ramp and y_star < x_star");
    }
    ContinuousModelSpec spec;
    spec.x_begin = 0.0;
    spec.x_star = x_star;
    spec.k = num(p, "k");
    spec.mu = num(p, "mu");
    // The jump at y_star is carried by a steep ramp ending at y_star, so p(y_star) = p_w + B.
    spec.p = CoefficientTable({0.0, y_star - ramp, y_star, x_star}, {p_w, p_w, p_w + B, p_w + B});
    spec.a = CoefficientTable::constant(num(p, "a_w"), 0.0, x_star);
    const ContinuousModelParams params(spec);
    const Grid grid(integer(p, "I"), 0.0, x_star);

    const CharProblem problem = GeneralProblem::from_model(params);
    std::optional<Box> box;
    if (p.contains("linearization_box")) {
        box = parse_box(p["linearization_box"]);
    } else if (const auto rho = rhp_modulus_bound(problem)) {
        const double r = 1.05 * *rho + 1e-3;
        box = Box{-0.2, r, -r, r};
    }
    auto b = instability(p, params, grid, linearization_report(problem, box));
    b.summary["p_jump"] = {{"p_w", p_w}, {"B", B}, {"y_star", y_star}, {"ramp_width", ramp}};
    return b;
}

OutputBundle fig45_instab(const json& p) {
    const double x_star = num(p, "x_star"), p_w = num(p, "p_w");
    ContinuousModelSpec spec;
    spec.x_begin = 0.0;
    spec.x_star = x_star;
    spec.k = num(p, "k");
    spec.mu = num(p, "mu");
    spec.p = CoefficientTable::constant(p_w, 0.0, x_star);
    spec.maturation = TabulatedMaturation::constant(num(p, "g"), 0.0, x_star);
    spec.alpha = FeedbackLaw::true_data(num(p, "a_w"), p_w, spec.k);
    const ContinuousModelParams params(spec);
    const Grid grid(integer(p, "I"), 0.0, x_star);
    const auto delay = DelayProblem::from_model(params);
    json lin = linearization_report(CharProblem{delay}, std::nullopt);
    lin["delay"] = {{"mu", delay.mu}, {"tau", delay.tau}, {"A", delay.A}};
    return instability(p, params, grid, lin);
}

OutputBundle extinction(const json& p) {
    OutputBundle b;
    const double x_star = num(p, "x_star");
    ContinuousModelSpec spec;
    spec.x_begin = 0.0;
    spec.x_star = x_star;
    spec.k = num(p, "k");
    spec.mu = num(p, "mu");
    spec.a = CoefficientTable::constant(num(p, "a_w"), 0.0, x_star);
    spec.p = CoefficientTable::constant(num(p, "p_w"), 0.0, x_star);
    const ContinuousModelParams params(spec);
    const Grid grid(integer(p, "I"), 0.0, x_star);
    const auto init = initial_from(p, params, grid);
    RunOptions o;
    o.t_end = num(p, "t_end");
    o.series_stride = integer(p, "series_stride");
    o.snapshot_count = 0;
    const auto tr = run(params, grid, init, o);

    const double a0 = params.alpha_law().at_zero();
    const double rate = log_slope(tr.times, tr.w, init.t + 0.75 * (o.t_end - init.t));
    const double rate_err = std::abs(rate - a0) / std::abs(a0);
    const double half = init.t + 0.5 * (o.t_end - init.t);
    const bool mono_w = non_increasing_from(tr.times, tr.w, half);
    const bool mono_v = non_increasing_from(tr.times, tr.v, half);
    const bool mono_u = non_increasing_from(tr.times, tr.u_mass, half);
    const double ratio = tr.final_state.w / init.w;
    const double bound = std::exp(a0 * (o.t_end - init.t)) * (1.0 + 1e-6);
    const double tol = num(p, "rate_tol");

    b.tables.emplace_back("series.csv", trajectory_table(tr));
    b.tables.emplace_back("profile.csv", profile_table(tr.final_state, grid));
    b.charts = {{"populations.svg",
                 LineChart{"Extinction", "t [days]", "cells", true,
                           {series_of("w", tr.times, tr.w), series_of("v", tr.times, tr.v),
                            series_of("int u dx", tr.times, tr.u_mass)}}}};
    json s = trajectory_summary(tr);
    s["alpha_zero"] = a0;
    s["fitted_rate"] = rate;
    s["rate_relative_error"] = rate_err;
    s["rate_tolerance"] = tol;
    s["monotone_latter_half"] = {{"w", mono_w}, {"v", mono_v}, {"u_mass", mono_u}};
    s["w_ratio"] = ratio;
    s["w_ratio_bound"] = bound;
    s["mu"] = params.mu();
    s["assertion"] = "late-time decay rate of w within tolerance of alpha(0); w, v and the u mass "
                     "non-increasing in the latter half; w(t)/w(0) below exp(alpha(0) t)";
    s["passed"] = rate_err < tol && mono_w && mono_v && mono_u && ratio <= bound &&
                  tr.max_residual < kBalanceTol;
    b.summary = s;
    return b;
}

OutputBundle persistence(const json& p) {
    OutputBundle b;
    const double x_star = num(p, "x_star");
    ContinuousModelSpec spec;
    spec.x_begin = 0.0;
    spec.x_star = x_star;
    spec.k = num(p, "k");
    spec.mu = num(p, "mu");
    spec.a = parse_table(p["a"], 0.0, x_star);
    spec.p = parse_table(p["p"], 0.0, x_star);
    const ContinuousModelParams params(spec);
    const Grid grid(integer(p, "I"), 0.0, x_star);
    const auto init = initial_from(p, params, grid);
    RunOptions o;
    o.t_end = num(p, "t_end");
    o.series_stride = integer(p, "series_stride");
    o.snapshot_count = 0;
    const auto tr = run(params, grid, init, o);

    const auto cert = apriori_bounds(params, grid, init);
    const auto report = check_bounds(tr, cert);
    const double half = init.t + 0.5 * (o.t_end - init.t);
    const double w_min = min_from(tr.times, tr.w, half);
    const double v_min = min_from(tr.times, tr.v, half);

    b.tables.emplace_back("series.csv", trajectory_table(tr));
    b.tables.emplace_back("profile.csv", profile_table(tr.final_state, grid));
    CsvTable viol;
    viol.header = {"t", "bound", "log_margin"};
    const std::vector<std::string> names = {"M1", "M2", "M3", "M4"};
    for (const auto& v : report.violations) {
        const auto idx = std::find(names.begin(), names.end(), v.which) - names.begin();
        viol.rows.push_back({v.t, static_cast<double>(idx + 1), v.log_margin});
    }
    b.tables.emplace_back("bound_violations.csv", viol);
    b.charts = {{"populations.svg",
                 LineChart{"Persistence", "t [days]", "cells", true,
                           {series_of("w", tr.times, tr.w), series_of("v", tr.times, tr.v),
                            series_of("int u dx", tr.times, tr.u_mass)}}}};

    json s = trajectory_summary(tr);
    s["alpha_zero"] = params.alpha_law().at_zero();
    s["min_w_latter_half"] = w_min;
    s["min_v_latter_half"] = v_min;
    s["mu"] = params.mu();
    s["certificate"] = {{"available", cert.available},
                        {"reason", cert.reason},
                        {"M", cert.M},
                        {"log_M1", cert.log_M1},
                        {"log_M2", cert.log_M2},
                        {"log_M3", cert.log_M3},
                        {"log_M4", cert.log_M4},
                        {"gamma", cert.gamma},
                        {"t_valid", cert.t_valid},
                        {"checked_times", report.checked},
                        {"violations", report.violations.size()}};
    s["assertion"] = "w and v bounded away from zero in the latter half; a priori bounds hold at "
                     "every recorded time after x*/g_-";
    s["passed"] = cert.available && w_min > 0.0 && v_min > 0.0 && report.violations.empty() &&
                  report.checked > 0 && tr.max_residual < kBalanceTol;
    b.summary = s;
    return b;
}

bool in_branch(const HopfPoint& h, double tau) {
    const double x = tau * h.omega;
    if (h.branch == 0) return x > 0.0 && x < kPi / 2.0;
    const double base = 2.0 * kPi * h.branch;
    return x > base && x <= base + kPi / 2.0;
}

OutputBundle hopf_scan(const json& p) {
    OutputBundle b;
    const double tau = num(p, "tau"), lo = num(p, "A_min"), hi = num(p, "A_max");
    const int n = integer(p, "A_steps");
    const double tol = num(p, "residual_tol");
    if (n < 1 || !(hi >= lo)) throw ConfigError("hopf-scan: need A_steps >= 1 and A_max >= A_min");
    CsvTable t;
    t.header = {"A", "branch", "omega", "mu", "tau_omega", "residual"};
    std::vector<Series> mu_series, om_series;
    auto series_for = [](std::vector<Series>& v, int k) -> Series& {
        const std::string name = "branch " + std::to_string(k);
        for (auto& s : v) {
            if (s.name == name) return s;
        }
        v.push_back(Series{name, {}, {}});
        return v.back();
    };
    bool ok = true;
    int points = 0;
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double A = lo + (hi - lo) * i / n;
        const auto r = hopf_simple(tau, A / tau);
        for (const auto& h : r.points) {
            t.rows.push_back({A, static_cast<double>(h.branch), h.omega, h.mu, tau * h.omega, h.residual});
            ok = ok && h.residual < tol && h.mu > 0.0 && in_branch(h, tau);
            worst = std::max(worst, h.residual);
            ++points;
            Series& ms = series_for(mu_series, h.branch);
            ms.x.push_back(A);
            ms.y.push_back(h.mu);
            Series& os = series_for(om_series, h.branch);
            os.x.push_back(A);
            os.y.push_back(h.omega);
        }
    }
    b.tables.emplace_back("hopf_points.csv", t);
    b.charts = {{"hopf_mu.svg", LineChart{"Hopf values of mu", "A = tau c", "mu [1/day]", true, mu_series}},
                {"hopf_omega.svg",
                 LineChart{"Crossing frequencies", "A = tau c", "omega [1/day]", false, om_series}}};
    b.summary = {{"tau", tau},
                 {"A_range", {lo, hi}},
                 {"points", points},
                 {"max_residual", worst},
                 {"residual_tolerance", tol},
                 {"assertion", "every Hopf point has mu > 0, tau omega in its branch interval and "
                               "|F(i omega)| below tolerance"},
                 {"passed", ok && points > 0}};
    return b;
}

OutputBundle ddecheck(const json& p) {
    OutputBundle b;
    const double mu = num(p, "mu"), tau = num(p, "tau");
    const double tol = num(p, "residual_tol");
    const auto As = num_list(p, "A");
    std::vector<std::future<RootReport>> futs;
    for (double A : As) {
        futs.push_back(std::async(std::launch::async, [=] {
            return rightmost_root(CharProblem{DelayProblem{mu, tau, A}});
        }));
    }
    CsvTable t;
    t.header = {"A", "re", "im", "residual", "rhp_count"};
    json cases = json::array();
    LineChart chart{"|G(i omega)| along the imaginary axis", "omega", "|G|", true, {}};
    bool ok = true;
    const json expect = p.contains("expect") ? p["expect"] : json::object();
    for (std::size_t i = 0; i < As.size(); ++i) {
        const auto rep = futs[i].get();
        const double A = As[i];
        double worst = 0.0;
        for (std::size_t r = 0; r < rep.roots.size(); ++r) {
            t.rows.push_back({A, rep.roots[r].real(), rep.roots[r].imag(), rep.residuals[r],
                              static_cast<double>(rep.rhp_count)});
            worst = std::max(worst, rep.residuals[r]);
        }
        const double re = rep.rightmost ? rep.rightmost->real() : -std::numeric_limits<double>::infinity();
        json c = {{"A", A},
                  {"box", box_json(rep.box)},
                  {"zeros_in_box", rep.count},
                  {"rhp_count", rep.rhp_count},
                  {"rightmost_re", finite_or_null(re)},
                  {"rightmost_im", rep.rightmost ? rep.rightmost->imag() : 0.0},
                  {"rightmost_sign", re < 0.0 ? "negative" : "positive"},
                  {"max_residual", worst},
                  {"notes", rep.notes}};
        ok = ok && worst < tol;
        std::ostringstream key;
        key << A;
        if (expect.contains(key.str())) {
            const std::string e = expect[key.str()].get<std::string>();
            const bool met = e == "stable" ? (re < 0.0 && rep.rhp_count == 0) : rep.rhp_count >= 1;
            c["expected"] = e;
            c["met"] = met;
            ok = ok && met;
        }
        cases.push_back(c);
        Series s{"A=" + key.str(), {}, {}};
        const DelayProblem dp{mu, tau, A};
        for (int k = 0; k <= 400; ++k) {
            const double om = 10.0 * k / 400.0;
            s.x.push_back(om);
            s.y.push_back(std::abs(char_G(CharProblem{dp}, cplx(0.0, om)).value));
        }
        chart.series.push_back(s);
    }
    b.tables.emplace_back("roots.csv", t);
    b.charts = {{"imaginary_axis.svg", chart}};
    b.summary = {{"mu", mu},
                 {"tau", tau},
                 {"cases", cases},
                 {"residual_tolerance", tol},
                 {"assertion", "rightmost root sign matches the expected stability for each A; "
                               "polished residuals below tolerance"},
                 {"passed", ok}};
    return b;
}

struct Entry {
    const char* name;
    OutputBundle (*fn)(const json&);
    const char* defaults;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {"fig1-grids", fig1_grids, R"({
            "preset": "table1.json", "grids": [6, 10, 25, 50, 100], "t_end": 30000,
            "compare_t_end": 500, "w0": 100000, "v0": 0, "u0": 0, "series_stride": 20,
            "compare_tol": 1e-6, "converge_tol": 1e-6})"},
        {"fig23-instab", fig23_instab, R"({
            "x_star": 50, "y_star": 20, "ramp": 1e-9, "p_w": 30, "B": 50, "a_w": 0.75,
            "k": 1.28e-9, "mu": 0.6925, "I": 100, "t_end": 2000, "series_stride": 10,
            "init": "steady", "perturbation": 0.01, "min_sign_changes": 3, "metric_floor": 1e-4})"},
        {"fig45-instab", fig45_instab, R"({
            "x_star": 1, "p_w": 6, "g": 1, "a_w": 0.75, "k": 1.28e-9, "mu": 0.6925, "I": 100,
            "t_end": 2000, "series_stride": 1, "init": "steady", "perturbation": 0.01,
            "min_sign_changes": 3, "metric_floor": 1e-4})"},
        {"extinction", extinction, R"({
            "x_star": 1, "a_w": 0.4, "p_w": 30, "k": 1.28e-9, "mu": 0.6925, "I": 100, "t_end": 5,
            "series_stride": 1, "init": "constant", "w0": 100000, "v0": 0, "u0": null,
            "rate_tol": 0.05})"},
        {"persistence", persistence, R"({
            "x_star": 1, "a": {"nodes": [0, 1], "values": [0.75, 0.6]},
            "p": {"nodes": [0, 1], "values": [1, 1.5]}, "k": 1.28e-9, "mu": 0.6925, "I": 100,
            "t_end": 200, "series_stride": 1, "init": "constant", "w0": 100000, "v0": 100000,
            "u0": null})"},
        {"hopf-scan", hopf_scan, R"({
            "tau": 1, "A_min": 1.05, "A_max": 14.5, "A_steps": 100, "residual_tol": 1e-8})"},
        {"ddecheck", ddecheck, R"({
            "mu": 1, "tau": 1, "A": [-1, -2], "expect": {"-1": "stable", "-2": "unstable"},
            "residual_tol": 1e-10})"},
    };
    return r;
}

const Entry& lookup(const std::string& name) {
    for (const auto& e : registry()) {
        if (name == e.name) return e;
    }
    std::string msg = "unknown scenario '" + name + "'; registered scenarios:";
    for (const auto& e : registry()) msg += std::string(" ") + e.name;
    throw ConfigError(msg);
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.emplace_back(e.name);
        return n;
    }();
    return names;
}

json scenario_defaults(const std::string& name) { return json::parse(lookup(name).defaults); }

OutputBundle build_scenario(const ScenarioConfig& config) {
    const Entry& e = lookup(config.scenario);
    json params = json::parse(e.defaults);
    for (const auto& [key, _] : config.params.items()) {
        if (!params.contains(key)) {
            throw ConfigError("scenario '" + config.scenario + "' has no parameter '" + key + "'");
        }
    }
    params.merge_patch(config.params);
    OutputBundle b = e.fn(params);
    b.scenario = config.scenario;
    b.dir = config.out_dir;
    b.summary["scenario"] = config.scenario;
    b.summary["params"] = params;
    return b;
}

std::vector<std::filesystem::path> emit_plots(const OutputBundle& bundle) {
    std::vector<std::filesystem::path> files;
    for (const auto& [name, chart] : bundle.charts) {
        LineChart c = chart;
        c.title = bundle.scenario + ": " + chart.title;
        const auto path = bundle.dir / name;
        write_text(path, render_svg(c));
        files.push_back(path);
    }
    return files;
}

std::vector<std::filesystem::path> write_bundle(const OutputBundle& bundle, bool plots) {
    std::vector<std::filesystem::path> files;
    for (const auto& [name, table] : bundle.tables) {
        const auto path = bundle.dir / name;
        write_text(path, to_csv(table));
        files.push_back(path);
    }
    if (plots) {
        auto svg = emit_plots(bundle);
        files.insert(files.end(), svg.begin(), svg.end());
    }
    const auto summary = bundle.dir / "summary.json";
    write_text(summary, bundle.summary.dump(2) + "\n");
    files.push_back(summary);
    return files;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    OutputBundle b = build_scenario(config);
    ScenarioResult r;
    r.files = write_bundle(b, config.plots);
    r.passed = b.summary.value("passed", false);
    r.summary = std::move(b.summary);
    return r;
}

json run_steady(const json& config, const std::filesystem::path& out_dir) {
    if (!config.is_object() || !config.contains("model")) {
        throw ConfigError("steady: config needs a 'model' object");
    }
    for (const auto& [key, _] : config.items()) {
        if (key != "model" && key != "I" && key != "method") {
            throw ConfigError("steady: unknown key '" + key + "'");
        }
    }
    const ContinuousModelParams params(parse_continuous_spec(config["model"]));
    const int I = config.contains("I") ? config["I"].get<int>() : 100;
    const std::string m = config.contains("method") ? config["method"].get<std::string>() : "quadrature";
    ProfileMethod method;
    if (m == "quadrature") method = ProfileMethod::Quadrature;
    else if (m == "scheme") method = ProfileMethod::SchemeFixedPoint;
    else throw ConfigError("steady: method must be \"quadrature\" or \"scheme\"");
    const Grid grid(I, params.x_begin(), params.x_star());
    const auto ss = steady_state(params, grid, method);
    json s = {{"exists_positive", ss.exists_positive},
              {"v_bar", ss.v_bar},
              {"w_bar", ss.w_bar},
              {"alpha_zero", params.alpha_law().at_zero()},
              {"I", I},
              {"method", m}};
    CsvTable t;
    t.comments = {"v_bar=" + format_double(ss.v_bar), "w_bar=" + format_double(ss.w_bar),
                  std::string("exists_positive=") + (ss.exists_positive ? "true" : "false")};
    if (ss.exists_positive) {
        const auto res = verify_steady(ss, params, grid);
        s["residuals"] = {{"alpha_w", res.alpha_w},         {"transport", res.transport},
                          {"transport_tol", res.transport_tol}, {"boundary", res.boundary},
                          {"outflow", res.outflow},         {"passed", res.passed}};
        t.comments.push_back("transport_residual=" + format_double(res.transport));
        t.comments.push_back("outflow_residual=" + format_double(res.outflow));
    }
    t.header = {"x", "u_bar"};
    for (std::size_t i = 0; i < ss.x.size(); ++i) t.rows.push_back({ss.x[i], ss.u_bar[i]});
    write_text(out_dir / "steady.csv", to_csv(t));
    write_text(out_dir / "summary.json", s.dump(2) + "\n");
    return s;
}

json run_stability(const std::string& variant, const json& params,
                   const std::filesystem::path& out_dir) {
    auto get = [&](const char* key, double fallback) {
        return params.contains(key) ? num(params, key) : fallback;
    };
    json s = {{"variant", variant}};
    auto roots_out = [&](const CharProblem& problem) {
        std::optional<Box> box;
        if (params.contains("box")) box = parse_box(params["box"]);
        const auto rep = rightmost_root(problem, box);
        CsvTable t;
        t.header = {"re", "im", "residual", "rhp_count"};
        for (std::size_t i = 0; i < rep.roots.size(); ++i) {
            t.rows.push_back({rep.roots[i].real(), rep.roots[i].imag(), rep.residuals[i],
                              static_cast<double>(rep.rhp_count)});
        }
        write_text(out_dir / "roots.csv", to_csv(t));
        s["box"] = box_json(rep.box);
        s["zeros_in_box"] = rep.count;
        s["rhp_count"] = rep.rhp_count;
        if (rep.rightmost) {
            s["rightmost"] = {rep.rightmost->real(), rep.rightmost->imag()};
            s["rightmost_residual"] = rep.rightmost_residual;
        }
        s["notes"] = rep.notes;
    };

    if (variant == "delay") {
        const DelayProblem dp{get("mu", 1.0), get("tau", 1.0), get("A", -1.0)};
        s["mu"] = dp.mu;
        s["tau"] = dp.tau;
        s["A"] = dp.A;
        roots_out(dp);
    } else if (variant == "reduced") {
        const double x_star = get("x_star", 1.0);
        const auto rp = ReducedProblem::from_model(
            get("mu", 0.6925), get("a_w", 0.75), get("p_w", 1.0),
            SegmentProfile::step(get("B", 0.0), get("y_star", 0.0), x_star), x_star);
        s["C"] = rp.C;
        s["D"] = rp.D;
        roots_out(rp);
    } else if (variant == "general") {
        if (!params.contains("model")) throw ConfigError("stability general: needs a 'model' object");
        const ContinuousModelParams mp(parse_continuous_spec(params["model"]));
        roots_out(GeneralProblem::from_model(mp));
    } else if (variant == "hopf") {
        const double tau = get("tau", 1.0);
        const double c = params.contains("A") ? num(params, "A") / tau : get("c", 1.2);
        const auto r = hopf_simple(tau, c);
        CsvTable t;
        t.header = {"branch", "omega", "mu", "residual"};
        json pts = json::array();
        for (const auto& h : r.points) {
            t.rows.push_back({static_cast<double>(h.branch), h.omega, h.mu, h.residual});
            pts.push_back({{"branch", h.branch}, {"omega", h.omega}, {"mu", h.mu}, {"residual", h.residual}});
        }
        write_text(out_dir / "hopf.csv", to_csv(t));
        s["tau"] = tau;
        s["c"] = c;
        s["A"] = tau * c;
        s["points"] = pts;
        s["notes"] = r.notes;
    } else if (variant == "heaviside") {
        const double a_w = get("a_w", 0.75), B = get("B", 50.0), p_w = get("p_w", 30.0);
        const double omega = get("omega", 30.0);
        const auto r = heaviside_hopf(a_w, B, p_w, omega);
        if (const auto* o = std::get_if<OutOfRange>(&r)) {
            s["out_of_range"] = true;
            s["c"] = o->c;
        } else {
            const auto& h = std::get<HeavisideHopf>(r);
            const CharProblem problem = heaviside_problem(a_w, B, p_w, h);
            s["delta"] = h.delta;
            s["mu"] = h.mu;
            s["theta"] = h.theta;
            s["c"] = h.c;
            s["residual"] = std::abs(char_eval(problem, cplx(0.0, omega)));
            json br = json::array();
            for (const auto& cb : imaginary_crossing_scan(problem, 0.5 * omega, 1.5 * omega, 2000)) {
                br.push_back({{"omega_lo", cb.omega_lo}, {"omega_hi", cb.omega_hi},
                              {"omega", cb.omega}, {"residual", cb.residual}});
            }
            s["crossings"] = br;
        }
    } else {
        throw ConfigError("unknown stability variant '" + variant +
                          "'; available: delay reduced general hopf heaviside");
    }
    write_text(out_dir / "summary.json", s.dump(2) + "\n");
    return s;
}

int derivative_sign_changes(const std::vector<double>& t, const std::vector<double>& y,
                            double t_from) {
    int changes = 0, last = 0;
    for (std::size_t i = 1; i < std::min(t.size(), y.size()); ++i) {
        if (t[i - 1] < t_from) continue;
        const double d = y[i] - y[i - 1];
        const int sgn = (d > 0.0) - (d < 0.0);
        if (sgn == 0) continue;
        if (last != 0 && sgn != last) ++changes;
        last = sgn;
    }
    return changes;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& y, double t_from) {
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
        if (t[i] < t_from || !(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        n += 1;
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
    }
    const double den = n * stt - st * st;
    if (n < 2 || !(den > 0.0)) throw DomainError("log_slope: fewer than two usable samples");
    return (n * sty - st * sy) / den;
}

}  // namespace celldiff
