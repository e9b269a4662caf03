#include "celldiff/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "celldiff/errors.hpp"

namespace celldiff {

namespace {

template <typename T>
T simpson_impl(const std::vector<T>& f, double h) {
    if (f.size() < 3 || f.size() % 2 == 0) {
        throw DomainError("simpson: need an odd number (>= 3) of samples, got " +
                          std::to_string(f.size()));
    }
    T odd{}, even{};
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        (i % 2 ? odd : even) += f[i];
    }
    return (f.front() + f.back() + 4.0 * odd + 2.0 * even) * (h / 3.0);
}

}  // namespace

double simpson(const std::vector<double>& f, double h) { return simpson_impl(f, h); }
cplx simpson(const std::vector<cplx>& f, double h) { return simpson_impl(f, h); }

cplx linear_exp_integral(double c0, double c1, cplx z, double h) {
    const cplx zh = z * h;
    if (std::abs(zh) < 0.5) {
        // Series: sum_n z^n / n! * (c0 h^{n+1}/(n+1) + c1 h^{n+2}/(n+2)).
        cplx sum = 0.0;
        cplx term = 1.0;  // (z h)^n / n!
        for (int n = 0; n < 40; ++n) {
            const cplx add = term * (c0 * h / (n + 1.0) + c1 * h * h / (n + 2.0));
            sum += add;
            if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
            term *= zh / (n + 1.0);
        }
        return sum;
    }
    const cplx e = std::exp(zh);
    const cplx i0 = (e - 1.0) / z;                // int e^{zs}
    const cplx i1 = (h * e) / z - (e - 1.0) / (z * z);  // int s e^{zs}
    return c0 * i0 + c1 * i1;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
              int max_iter) {
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NumericalError("bisect: no sign change on [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::max({std::abs(lo), std::abs(hi), 1e-300})) break;
    }
    return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                  int max_iter) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - r * (hi - lo);
    double d = lo + r * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace celldiff
