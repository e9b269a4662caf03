#include "celldiff/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "celldiff/errors.hpp"

namespace celldiff {

double signal(double v, double k) {
    if (!(v >= 0.0)) {
        throw DomainError("signal: cell count must be nonnegative, got " + std::to_string(v));
    }
    if (!(k > 0.0)) {
        throw DomainError("signal: feedback constant must be positive, got " + std::to_string(k));
    }
    return 1.0 / (1.0 + k * v);
}

FeedbackLaw FeedbackLaw::true_data(double a_w, double p_w, double k) {
    if (!(a_w > 0.0 && a_w <= 1.0)) {
        throw ConfigError("TrueData alpha: a_w must lie in (0, 1], got " + std::to_string(a_w));
    }
    if (!(p_w > 0.0) || !std::isfinite(p_w)) {
        throw ConfigError("TrueData alpha: p_w must be positive, got " + std::to_string(p_w));
    }
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw ConfigError("TrueData alpha: k must be positive, got " + std::to_string(k));
    }
    return FeedbackLaw(TrueDataAlpha{a_w, p_w, k});
}

FeedbackLaw FeedbackLaw::generic(std::function<double(double)> fn, double sample_max) {
    if (!fn) {
        throw ConfigError("generic alpha: empty callable");
    }
    if (!(sample_max > 0.0) || !std::isfinite(sample_max)) {
        throw ConfigError("generic alpha: sample_max must be positive and finite");
    }
    // 10^4 log-spaced samples on [sample_max * 1e-12, sample_max], plus v = 0.
    constexpr int kSamples = 10000;
    const double lo = std::log(sample_max * 1e-12);
    const double hi = std::log(sample_max);
    double prev = fn(0.0);
    if (!std::isfinite(prev)) {
        throw ConfigError("generic alpha: non-finite value at v=0");
    }
    const double first = prev;
    for (int i = 0; i < kSamples; ++i) {
        const double v = std::exp(lo + (hi - lo) * i / (kSamples - 1));
        const double a = fn(v);
        if (!std::isfinite(a)) {
            throw ConfigError("generic alpha: non-finite value at v=" + std::to_string(v));
        }
        if (a > prev) {
            throw ConfigError("generic alpha: not decreasing near v=" + std::to_string(v));
        }
        prev = a;
    }
    if (!(prev < first)) {
        throw ConfigError("generic alpha: constant on the sampled range");
    }
    if (!(prev < 0.0)) {
        throw ConfigError("generic alpha: value at the largest sample must be negative, got " +
                          std::to_string(prev));
    }
    return FeedbackLaw(GenericAlpha{std::move(fn), sample_max});
}

double FeedbackLaw::operator()(double v) const {
    if (!(v >= 0.0)) {
        throw DomainError("alpha: cell count must be nonnegative, got " + std::to_string(v));
    }
    if (const auto* t = std::get_if<TrueDataAlpha>(&law_)) {
        return (2.0 * t->a_w / (1.0 + t->k * v) - 1.0) * t->p_w;
    }
    return std::get<GenericAlpha>(law_).fn(v);
}

double FeedbackLaw::derivative(double v) const {
    if (!(v >= 0.0)) {
        throw DomainError("alpha': cell count must be nonnegative, got " + std::to_string(v));
    }
    if (const auto* t = std::get_if<TrueDataAlpha>(&law_)) {
        const double q = 1.0 + t->k * v;
        return -2.0 * t->k * t->a_w * t->p_w / (q * q);
    }
    const auto& g = std::get<GenericAlpha>(law_);
    const double h = 1e-6 * std::max(v, 1e-3 * g.sample_max);
    if (v < h) {
        return (g.fn(v + h) - g.fn(v)) / h;
    }
    return (g.fn(v + h) - g.fn(v - h)) / (2.0 * h);
}

double FeedbackLaw::at_infinity() const {
    if (const auto* t = std::get_if<TrueDataAlpha>(&law_)) {
        return -t->p_w;
    }
    const auto& g = std::get<GenericAlpha>(law_);
    return g.fn(g.sample_max);
}

double FeedbackLaw::scale() const {
    if (const auto* t = std::get_if<TrueDataAlpha>(&law_)) {
        return 1.0 / t->k;
    }
    return std::get<GenericAlpha>(law_).sample_max;
}

double alpha(double v, const FeedbackLaw& law) { return law(v); }

double TabulatedMaturation::operator()(double x, double v) const {
    const std::size_t nv = v_nodes.size();
    auto locate = [](const std::vector<double>& nodes, double q, const char* axis) {
        const double slack = 1e-12 * std::max(1.0, std::abs(nodes.back() - nodes.front()));
        if (!(q >= nodes.front() - slack && q <= nodes.back() + slack)) {
            throw DomainError(std::string("tabulated g: ") + axis + "=" + std::to_string(q) +
                              " outside the table");
        }
        auto it = std::upper_bound(nodes.begin(), nodes.end(), q);
        std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
        i = std::min(i, nodes.size() - 2);
        double t = (q - nodes[i]) / (nodes[i + 1] - nodes[i]);
        t = std::clamp(t, 0.0, 1.0);
        return std::pair{i, t};
    };
    const auto [ix, tx] = locate(x_nodes, x, "x");
    const auto [iv, tv] = locate(v_nodes, v, "v");
    auto at = [&](std::size_t i, std::size_t j) { return values[i * nv + j]; };
    const double lo = at(ix, iv) + (at(ix, iv + 1) - at(ix, iv)) * tv;
    const double hi = at(ix + 1, iv) + (at(ix + 1, iv + 1) - at(ix + 1, iv)) * tv;
    return lo + (hi - lo) * tx;
}

TabulatedMaturation TabulatedMaturation::constant(double value, double x_begin, double x_end) {
    const double vmax = std::numeric_limits<double>::max();
    return TabulatedMaturation{{x_begin, x_end}, {0.0, vmax}, {value, value, value, value}};
}

namespace {

void validate_tabulated(const TabulatedMaturation& t) {
    auto increasing = [](const std::vector<double>& n) {
        if (n.size() < 2) return false;
        for (std::size_t i = 1; i < n.size(); ++i) {
            if (!(n[i] > n[i - 1])) return false;
        }
        return true;
    };
    if (!increasing(t.x_nodes) || !increasing(t.v_nodes)) {
        throw ConfigError("tabulated g: node lists need >= 2 strictly increasing entries");
    }
    if (t.values.size() != t.x_nodes.size() * t.v_nodes.size()) {
        throw ConfigError("tabulated g: expected " +
                          std::to_string(t.x_nodes.size() * t.v_nodes.size()) + " values, got " +
                          std::to_string(t.values.size()));
    }
    if (t.v_nodes.front() > 0.0) {
        throw ConfigError("tabulated g: v nodes must start at 0");
    }
    for (double g : t.values) {
        if (!std::isfinite(g)) throw ConfigError("tabulated g: non-finite value");
    }
}

}  // namespace

ContinuousModelParams::ContinuousModelParams(ContinuousModelSpec spec)
    : spec_(std::move(spec)), alpha_(FeedbackLaw::true_data(1.0, 1.0, 1.0)) {
    if (!(spec_.x_star > spec_.x_begin) || !std::isfinite(spec_.x_star) ||
        !std::isfinite(spec_.x_begin)) {
        throw ConfigError("maturity interval must satisfy x_begin < x_star");
    }
    if (!(spec_.k > 0.0) || !std::isfinite(spec_.k)) {
        throw ConfigError("k must be positive and finite");
    }
    if (!(spec_.mu > 0.0) || !std::isfinite(spec_.mu)) {
        throw ConfigError("mu must be positive and finite");
    }
    if (!(spec_.epsilon > 0.0 && spec_.epsilon <= 1.0)) {
        throw ConfigError("epsilon must lie in (0, 1], got " + std::to_string(spec_.epsilon));
    }
    if (!spec_.p.covers(spec_.x_begin, spec_.x_star)) {
        throw ConfigError("p table does not cover the maturity interval");
    }
    if (spec_.p.min_value() < 0.0) {
        throw ConfigError("p table contains negative rates");
    }
    if (spec_.a) {
        if (!spec_.a->covers(spec_.x_begin, spec_.x_star)) {
            throw ConfigError("a table does not cover the maturity interval");
        }
        if (spec_.a->min_value() < 0.0 || spec_.a->max_value() > 1.0) {
            throw ConfigError("a table values must lie in [0, 1]");
        }
    }
    if (true_data_g() && !spec_.a) {
        throw ConfigError("TrueData maturation requires an a table");
    }
    if (const auto* t = std::get_if<TabulatedMaturation>(&spec_.maturation)) {
        validate_tabulated(*t);
    }
    if (const auto* f = std::get_if<FunctionMaturation>(&spec_.maturation); f && !f->fn) {
        throw ConfigError("function maturation: empty callable");
    }

    if (spec_.alpha) {
        alpha_ = *spec_.alpha;
    } else {
        if (!spec_.a) {
            throw ConfigError("no alpha law given and no a table to derive one from");
        }
        const double a_w = (*spec_.a)(spec_.x_begin);
        const double p_w = spec_.p(spec_.x_begin);
        alpha_ = FeedbackLaw::true_data(a_w, p_w, spec_.k);
        spec_.alpha = alpha_;
    }
    if (spec_.boundary == BoundaryMode::General && !alpha_.true_data_params()) {
        throw ConfigError("general boundary needs a TrueData alpha law (a_w, p_w)");
    }

    if (spec_.v_max > 0.0) {
        v_max_ = spec_.v_max;
    } else if (const auto* t = alpha_.true_data_params()) {
        const double excess = 2.0 * t->a_w - 1.0;
        v_max_ = excess > 0.0 ? 10.0 * excess / t->k : 10.0 / t->k;
    } else {
        v_max_ = alpha_.scale();
    }

    g_minus_ = std::numeric_limits<double>::infinity();
    g_plus_ = -std::numeric_limits<double>::infinity();
    for (double x : x_samples()) {
        for (double v : v_samples()) {
            const double gv = g(x, v);
            if (!std::isfinite(gv)) {
                throw ConfigError("g is not finite at x=" + std::to_string(x) +
                                  ", v=" + std::to_string(v));
            }
            g_minus_ = std::min(g_minus_, gv);
            g_plus_ = std::max(g_plus_, gv);
        }
    }
    if (!(g_minus_ > 0.0)) {
        throw ConfigError("maturation rate is not bounded away from zero (g_min=" +
                          std::to_string(g_minus_) + ")");
    }
}

std::vector<double> ContinuousModelParams::x_samples() const {
    constexpr int kUniform = 201;
    std::vector<double> xs;
    xs.reserve(kUniform + 32);
    for (int i = 0; i < kUniform; ++i) {
        xs.push_back(i == kUniform - 1 ? spec_.x_star
                                       : spec_.x_begin + length() * i / (kUniform - 1));
    }
    auto add_nodes = [&](std::span<const double> nodes) {
        for (double n : nodes) {
            if (n > spec_.x_begin && n < spec_.x_star) xs.push_back(n);
        }
    };
    add_nodes(spec_.p.nodes());
    if (spec_.a) add_nodes(spec_.a->nodes());
    if (const auto* t = std::get_if<TabulatedMaturation>(&spec_.maturation)) {
        add_nodes(t->x_nodes);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

std::vector<double> ContinuousModelParams::v_samples() const {
    constexpr int kSamples = 65;
    std::vector<double> vs(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        vs[i] = v_max_ * i / (kSamples - 1);
    }
    return vs;
}

void ContinuousModelParams::check_x(double x) const {
    const double slack = 1e-12 * std::max(1.0, length());
    if (!(x >= spec_.x_begin - slack && x <= spec_.x_star + slack)) {
        throw DomainError("maturity x=" + std::to_string(x) + " outside [" +
                          std::to_string(spec_.x_begin) + ", " + std::to_string(spec_.x_star) + "]");
    }
}

double ContinuousModelParams::p(double x) const {
    check_x(x);
    return spec_.p(x);
}

double ContinuousModelParams::a(double x) const {
    check_x(x);
    if (!spec_.a) {
        throw ConfigError("model has no a table");
    }
    return (*spec_.a)(x);
}

double ContinuousModelParams::g(double x, double v) const {
    check_x(x);
    if (!(v >= 0.0)) {
        throw DomainError("g: cell count must be nonnegative, got " + std::to_string(v));
    }
    return std::visit(
        [&](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, TrueDataMaturation>) {
                return 2.0 * (1.0 - (*spec_.a)(x) / (1.0 + spec_.k * v)) * spec_.p(x);
            } else if constexpr (std::is_same_v<T, TabulatedMaturation>) {
                return law(x, v);
            } else {
                return law.fn(x, v);
            }
        },
        spec_.maturation);
}

double ContinuousModelParams::dg_dv(double x, double v) const {
    check_x(x);
    if (!(v >= 0.0)) {
        throw DomainError("dg/dv: cell count must be nonnegative, got " + std::to_string(v));
    }
    if (true_data_g()) {
        const double q = 1.0 + spec_.k * v;
        return 2.0 * (*spec_.a)(x) * spec_.p(x) * spec_.k / (q * q);
    }
    const double h = 1e-4 / spec_.k;
    if (v < h) {
        return (g(x, v + h) - g(x, v)) / h;
    }
    return (g(x, v + h) - g(x, v - h)) / (2.0 * h);
}

double ContinuousModelParams::boundary_factor(double v) const {
    const auto* t = alpha_.true_data_params();
    if (!t) {
        throw ConfigError("boundary factor needs a TrueData alpha law");
    }
    return 2.0 * (1.0 - t->a_w * signal(v, t->k)) * t->p_w / g(spec_.x_begin, v);
}

double g_eval(double x, double v, const ContinuousModelParams& params) { return params.g(x, v); }

double dg_dv(double x, double v, const ContinuousModelParams& params) {
    return params.dg_dv(x, v);
}

double table_eval(const CoefficientTable& table, double x) { return table(x); }

DiscreteModelParams::DiscreteModelParams(std::vector<double> a, std::vector<double> p,
                                         std::vector<double> d, double k)
    : a_(std::move(a)), p_(std::move(p)), d_(std::move(d)), k_(k) {
    const std::size_t n = d_.size();
    if (n < 3) {
        throw ConfigError("discrete model needs at least 3 compartments, got " + std::to_string(n));
    }
    if (a_.size() != n - 1 || p_.size() != n - 1) {
        throw ConfigError("discrete model: a and p need n-1=" + std::to_string(n - 1) + " entries");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(a_[i] > 0.0 && a_[i] <= 1.0)) {
            throw ConfigError("discrete model: a_" + std::to_string(i + 1) + " outside (0, 1]");
        }
        if (!(p_[i] > 0.0) || !std::isfinite(p_[i])) {
            throw ConfigError("discrete model: p_" + std::to_string(i + 1) + " must be positive");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(d_[i] >= 0.0) || !std::isfinite(d_[i])) {
            throw ConfigError("discrete model: d_" + std::to_string(i + 1) + " must be nonnegative");
        }
    }
    if (!(d_.back() > 0.0)) {
        throw ConfigError("discrete model: terminal death rate d_n must be positive");
    }
    if (!(k_ > 0.0) || !std::isfinite(k_)) {
        throw ConfigError("discrete model: k must be positive");
    }
}

bool DiscreteModelParams::has_interior_death() const {
    return std::any_of(d_.begin(), d_.end() - 1, [](double d) { return d != 0.0; });
}

ContinuousModelParams discrete_to_continuous(const DiscreteModelParams& d, int I) {
    const auto n = static_cast<int>(d.n());
    if (I < n - 2) {
        throw ConfigError("grid resolution I=" + std::to_string(I) + " is below n-2=" +
                          std::to_string(n - 2));
    }
    std::vector<double> nodes(d.n() - 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i] = static_cast<double>(i + 1);
    }
    ContinuousModelSpec spec;
    spec.x_begin = 1.0;
    spec.x_star = static_cast<double>(n - 1);
    spec.k = d.k();
    spec.mu = d.d().back();
    spec.a = CoefficientTable(nodes, d.a());
    spec.p = CoefficientTable(nodes, d.p());
    spec.maturation = TrueDataMaturation{};
    spec.boundary = BoundaryMode::Simplified;
    return ContinuousModelParams(std::move(spec));
}

}  // namespace celldiff
