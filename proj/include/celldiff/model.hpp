#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "celldiff/coefficient_table.hpp"

namespace celldiff {

/// Cytokine signal intensity s(v) = 1/(1+kv).
double signal(double v, double k);

struct TrueDataAlpha {
    double a_w;  // stem-cell self-renewal fraction, in (0, 1]
    double p_w;  // stem-cell proliferation rate [1/day]
    double k;    // feedback constant [1/cells]
};

struct GenericAlpha {
    std::function<double(double)> fn;
    double sample_max;  // certification window [0, sample_max]
};

/// Net stem-cell growth rate alpha(v).
///
/// TrueData is (2 a_w s(v) - 1) p_w. Generic laws are certified on
/// construction: decreasing over 10^4 log-spaced samples of
/// [0, sample_max], with a negative value at sample_max standing in for
/// alpha(infinity).
class FeedbackLaw {
public:
    static FeedbackLaw true_data(double a_w, double p_w, double k);
    static FeedbackLaw generic(std::function<double(double)> alpha, double sample_max);

    double operator()(double v) const;
    double derivative(double v) const;
    double at_zero() const { return (*this)(0.0); }
    /// alpha(infinity) for TrueData; the value at sample_max otherwise.
    double at_infinity() const;
    /// Characteristic cell-count scale: 1/k or sample_max.
    double scale() const;

    const TrueDataAlpha* true_data_params() const { return std::get_if<TrueDataAlpha>(&law_); }

private:
    explicit FeedbackLaw(std::variant<TrueDataAlpha, GenericAlpha> law) : law_(std::move(law)) {}
    std::variant<TrueDataAlpha, GenericAlpha> law_;
};

double alpha(double v, const FeedbackLaw& law);

/// g(x,v) = 2 (1 - a(x) s(v)) p(x), built from the a and p tables.
struct TrueDataMaturation {};

/// g sampled on an (x, v) grid, bilinear in between.
struct TabulatedMaturation {
    std::vector<double> x_nodes;
    std::vector<double> v_nodes;
    std::vector<double> values;  // row-major, values[ix * v_nodes.size() + iv]

    double operator()(double x, double v) const;
    static TabulatedMaturation constant(double value, double x_begin, double x_end);
};

/// g supplied as a closed-form callable.
struct FunctionMaturation {
    std::function<double(double, double)> fn;
};

using MaturationLaw = std::variant<TrueDataMaturation, TabulatedMaturation, FunctionMaturation>;

enum class BoundaryMode {
    Simplified,  // u(0,t) = w(t)
    General,     // g(0,v) u(0,t) = 2 (1 - a_w s(v)) p_w w(t)
};

/// Plain description of a continuous model; validated by ContinuousModelParams.
struct ContinuousModelSpec {
    double x_begin = 0.0;
    double x_star = 1.0;
    double k = 1.28e-9;
    double mu = 0.6925;
    std::optional<CoefficientTable> a;  // required for TrueData g or a defaulted alpha
    CoefficientTable p = CoefficientTable::constant(1.0, 0.0, 1.0);
    MaturationLaw maturation = TrueDataMaturation{};
    std::optional<FeedbackLaw> alpha;  // default: TrueData with a_w=a(x_begin), p_w=p(x_begin)
    BoundaryMode boundary = BoundaryMode::Simplified;
    double epsilon = 1.0;
    double v_max = 0.0;  // certification window for g bounds; 0 selects the default
};

/// Validated, immutable continuous-model parameterization.
class ContinuousModelParams {
public:
    explicit ContinuousModelParams(ContinuousModelSpec spec);

    double g(double x, double v) const;
    double dg_dv(double x, double v) const;
    double alpha(double v) const { return alpha_(v); }
    double p(double x) const;
    double a(double x) const;
    /// 2 (1 - a_w s(v)) p_w / g(x_begin, v): u(x_begin) per stem cell on the boundary.
    double boundary_factor(double v) const;

    const FeedbackLaw& alpha_law() const { return alpha_; }
    const CoefficientTable& p_table() const { return spec_.p; }
    const std::optional<CoefficientTable>& a_table() const { return spec_.a; }
    const MaturationLaw& maturation() const { return spec_.maturation; }
    bool true_data_g() const { return std::holds_alternative<TrueDataMaturation>(spec_.maturation); }

    double x_begin() const { return spec_.x_begin; }
    double x_star() const { return spec_.x_star; }
    double length() const { return spec_.x_star - spec_.x_begin; }
    double k() const { return spec_.k; }
    double mu() const { return spec_.mu; }
    double epsilon() const { return spec_.epsilon; }
    BoundaryMode boundary() const { return spec_.boundary; }
    double v_max() const { return v_max_; }
    double g_minus() const { return g_minus_; }
    double g_plus() const { return g_plus_; }
    const ContinuousModelSpec& spec() const { return spec_; }
    const std::vector<std::string>& notes() const { return notes_; }

    /// Sample points used for g bounds (table nodes plus a uniform 201-point grid).
    std::vector<double> x_samples() const;
    /// 65 v-samples spanning [0, v_max].
    std::vector<double> v_samples() const;

private:
    void check_x(double x) const;

    ContinuousModelSpec spec_;
    FeedbackLaw alpha_;
    double v_max_ = 0.0;
    double g_minus_ = 0.0;
    double g_plus_ = 0.0;
    std::vector<std::string> notes_;
};

double g_eval(double x, double v, const ContinuousModelParams& params);
double dg_dv(double x, double v, const ContinuousModelParams& params);
double table_eval(const CoefficientTable& table, double x);

/// n-compartment parameterization of the discrete model.
class DiscreteModelParams {
public:
    DiscreteModelParams(std::vector<double> a, std::vector<double> p, std::vector<double> d, double k);

    std::size_t n() const { return d_.size(); }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& p() const { return p_; }
    const std::vector<double>& d() const { return d_; }
    double k() const { return k_; }
    bool has_interior_death() const;

private:
    std::vector<double> a_;
    std::vector<double> p_;
    std::vector<double> d_;
    double k_;
};

/// Maps compartments i=1..n-1 onto nodes x=i of a piecewise-linear a, p on
/// [1, n-1]; mu = d_n. Requires I >= n-2 so the grid resolves every node.
ContinuousModelParams discrete_to_continuous(const DiscreteModelParams& d, int I);

}  // namespace celldiff
