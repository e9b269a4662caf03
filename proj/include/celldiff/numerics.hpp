#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace celldiff {

using cplx = std::complex<double>;

/// Composite Simpson rule on an odd number of equally spaced samples.
double simpson(const std::vector<double>& f, double h);
cplx simpson(const std::vector<cplx>& f, double h);

/// Exact integral of (c0 + c1 s) e^{z s} over s in [0, h].
cplx linear_exp_integral(double c0, double c1, cplx z, double h);

/// Bisection on a sign-changing bracket; stops at |hi - lo| <= rel_tol * max(|lo|, |hi|, tiny).
double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
              int max_iter = 400);

/// Golden-section minimization of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol,
                  int max_iter = 200);

}  // namespace celldiff
