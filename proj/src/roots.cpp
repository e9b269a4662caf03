#include "celldiff/roots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "celldiff/errors.hpp"

namespace celldiff {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329,
                                        0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926,
                                        0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013,
                                        0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245,
                                        0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970,
                                        0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518,
                                        0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550,
                                        0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649,
                                        0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082,
                                       0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975,
                                       0.417959183673469387755102040816327};

cplx derivative(const CharProblem& problem, cplx z) {
    const double h = 1e-6 * (1.0 + std::abs(z));
    return (char_G(problem, z + h).value - char_G(problem, z - h).value) / (2.0 * h);
}

struct NearZero {};

// Integrand G'/G along the segment a + t (b - a); flags a contour passing too close to a zero.
struct EdgeIntegrator {
    const CharProblem& problem;
    int evaluations = 0;

    cplx ratio(cplx z) {
        ++evaluations;
        const cplx g = char_G(problem, z).value;
        const cplx dg = derivative(problem, z);
        if (std::abs(g) < 1e-6 * std::abs(dg) || g == cplx(0.0)) throw NearZero{};
        return dg / g;
    }

    cplx gk15(cplx a, cplx b, cplx& err) {
        const cplx c = 0.5 * (a + b);
        const cplx half = 0.5 * (b - a);
        const cplx fc = ratio(c);
        cplx kron = fc * kWgk[7];
        cplx gauss = fc * kWg[3];
        for (int j = 0; j < 7; ++j) {
            const cplx dz = half * kXgk[j];
            const cplx f1 = ratio(c - dz);
            const cplx f2 = ratio(c + dz);
            kron += kWgk[j] * (f1 + f2);
            if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
        }
        err = (kron - gauss) * half;
        return kron * half;
    }

    // A panel is accepted only when |b - a| |G'/G| <= 1 at both ends and the midpoint, so panels
    // shrink geometrically towards a zero lying just off the contour instead of stepping over it.
    cplx adaptive(cplx a, cplx b, double tol, int depth) {
        return adaptive(a, b, ratio(a), ratio(b), tol, depth);
    }

    cplx adaptive(cplx a, cplx b, cplx ra, cplx rb, double tol, int depth) {
        const cplx m = 0.5 * (a + b);
        const cplx rm = ratio(m);
        const double len = std::abs(b - a);
        const bool resolved = len * std::max({std::abs(ra), std::abs(rb), std::abs(rm)}) <= 1.0;
        if (resolved || depth >= 40) {
            cplx err;
            const cplx val = gk15(a, b, err);
            if ((resolved && std::abs(err) <= tol) || depth >= 40) return val;
        }
        return adaptive(a, m, ra, rm, 0.5 * tol, depth + 1) + adaptive(m, b, rm, rb, 0.5 * tol, depth + 1);
    }
};

double box_diameter(const Box& b) {
    return std::hypot(b.re_max - b.re_min, b.im_max - b.im_min);
}

bool inside(const Box& b, cplx z, double pad = 0.0) {
    return z.real() >= b.re_min - pad && z.real() <= b.re_max + pad && z.imag() >= b.im_min - pad &&
           z.imag() <= b.im_max + pad;
}

std::optional<int> count_with_nudge(const CharProblem& problem, Box& box,
                                    std::vector<std::string>* notes) {
    for (int attempt = 0; attempt <= 5; ++attempt) {
        if (auto n = winding_number(problem, box)) return n;
        if (attempt == 5) break;
        const double d = 1e-3 * std::max(1.0, box_diameter(box) * 1e-2);
        box.re_min -= d;
        box.re_max += d * 0.7;
        box.im_min -= d * 0.9;
        box.im_max += d * 1.1;
        if (notes) {
            std::ostringstream msg;
            msg << "contour passed close to a zero; box nudged by " << d;
            notes->push_back(msg.str());
        }
    }
    return std::nullopt;
}

void localize(const CharProblem& problem, Box box, int count, int depth, std::vector<cplx>& roots,
              std::vector<std::string>& notes) {
    if (count <= 0) return;
    const double w = box.re_max - box.re_min;
    const double h = box.im_max - box.im_min;
    if (count == 1 || depth > 40 || std::max(w, h) < 1e-7) {
        const cplx start(0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max));
        cplx z = newton_polish(problem, start);
        if (!inside(box, z, 0.05 * std::max(w, h))) {
            // Newton escaped: restart from a coarse scan of |G| over the box.
            double best = std::numeric_limits<double>::infinity();
            cplx best_z = start;
            for (int i = 0; i <= 16; ++i) {
                for (int j = 0; j <= 16; ++j) {
                    const cplx q(box.re_min + w * i / 16.0, box.im_min + h * j / 16.0);
                    const double m = std::abs(char_G(problem, q).value);
                    if (m < best) {
                        best = m;
                        best_z = q;
                    }
                }
            }
            z = newton_polish(problem, best_z);
        }
        for (int i = 0; i < count; ++i) roots.push_back(z);
        if (count > 1) notes.push_back("cluster of " + std::to_string(count) + " zeros not separated");
        return;
    }
    // Split the longer side; shift the cut slightly off-centre to avoid symmetric zeros.
    for (double frac : {0.5 + 1e-3 * std::numbers::sqrt2, 0.5 - 7.3e-3, 0.5 + 2.1e-2}) {
        Box a = box, b = box;
        if (w >= h) {
            const double cut = box.re_min + frac * w;
            a.re_max = cut;
            b.re_min = cut;
        } else {
            const double cut = box.im_min + frac * h;
            a.im_max = cut;
            b.im_min = cut;
        }
        const auto na = winding_number(problem, a);
        const auto nb = winding_number(problem, b);
        if (!na || !nb || *na < 0 || *nb < 0 || *na + *nb != count) continue;
        localize(problem, a, *na, depth + 1, roots, notes);
        localize(problem, b, *nb, depth + 1, roots, notes);
        return;
    }
    notes.push_back("box subdivision failed; polishing from the centre");
    localize(problem, box, 1, 41, roots, notes);
}

}  // namespace

Box default_box(const CharProblem& problem) {
    const double S = problem_scale(problem);
    Box b{-5.0 * S, S, -40.0 * S, 40.0 * S};
    if (const auto rho = rhp_modulus_bound(problem)) {
        const double r = 1.05 * *rho + 1e-3;
        b.re_max = std::max(b.re_max, r);
        b.im_max = std::max(b.im_max, r);
        b.im_min = std::min(b.im_min, -r);
    }
    return b;
}

std::optional<int> winding_number(const CharProblem& problem, const Box& box) {
    const std::array<cplx, 5> corners = {cplx(box.re_min, box.im_min), cplx(box.re_max, box.im_min),
                                         cplx(box.re_max, box.im_max), cplx(box.re_min, box.im_max),
                                         cplx(box.re_min, box.im_min)};
    EdgeIntegrator integ{problem};
    double total_phase = 0.0;
    try {
        for (int e = 0; e < 4; ++e) {
            const cplx a = corners[e];
            const cplx b = corners[e + 1];
            const cplx integral = integ.adaptive(a, b, 1e-8 * std::max(1.0, std::abs(b - a)), 0);
            const double phase = integral.imag();
            // Exact phase change modulo 2 pi from the endpoint values.
            const double exact = std::arg(char_G(problem, b).value / char_G(problem, a).value);
            const double turns = std::round((phase - exact) / (2.0 * kPi));
            const double unwrapped = exact + 2.0 * kPi * turns;
            const double deviation = std::abs(phase - unwrapped) / (2.0 * kPi);
            if (deviation > 0.25) {
                throw NumericalError("winding number: integrated phase deviates by " +
                                     std::to_string(deviation) + " turns on a box edge");
            }
            total_phase += unwrapped;
        }
    } catch (const NearZero&) {
        return std::nullopt;
    }
    const double w = total_phase / (2.0 * kPi);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.25) {
        throw NumericalError("winding number: non-integer total " + std::to_string(w));
    }
    return static_cast<int>(rounded);
}

cplx newton_polish(const CharProblem& problem, cplx z, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const cplx g = char_G(problem, z).value;
        if (std::abs(g) < 1e-13) break;
        const cplx dg = derivative(problem, z);
        if (dg == cplx(0.0)) break;
        cplx step = g / dg;
        // Damp very long steps.
        const double cap = 1.0 + std::abs(z);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

RootReport rightmost_root(const CharProblem& problem, const std::optional<Box>& box) {
    RootReport rep;
    rep.box = box.value_or(default_box(problem));
    if (const auto rho = rhp_modulus_bound(problem)) {
        if (rep.box.re_max < *rho || rep.box.im_max < *rho || rep.box.im_min > -*rho) {
            std::ostringstream msg;
            msg << "box does not contain the right-half-plane bound " << *rho
                << "; rhp_count covers the box only";
            rep.notes.push_back(msg.str());
        }
    } else {
        rep.notes.push_back("no right-half-plane modulus bound for this variant");
    }
    if (std::abs(char_G(problem, 0.0).value) < 1e-12 * char_G(problem, 0.0).scale) {
        rep.notes.push_back("G(0) vanishes: lambda=0 is a zero of G");
    }

    const auto total = count_with_nudge(problem, rep.box, &rep.notes);
    if (!total) {
        throw NumericalError("rightmost_root: contour kept hitting zeros after 5 nudges");
    }
    rep.count = *total;

    Box right = rep.box;
    right.re_min = 1e-9 * problem_scale(problem);
    if (right.re_max > right.re_min) {
        const auto rhp = count_with_nudge(problem, right, &rep.notes);
        if (!rhp) throw NumericalError("rightmost_root: right-half-plane count failed");
        rep.rhp_count = *rhp;
    }

    localize(problem, rep.box, rep.count, 0, rep.roots, rep.notes);
    for (const cplx& z : rep.roots) rep.residuals.push_back(std::abs(char_G(problem, z).value));
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        if (!rep.rightmost || rep.roots[i].real() > rep.rightmost->real()) {
            rep.rightmost = rep.roots[i];
            rep.rightmost_residual = rep.residuals[i];
        }
    }
    return rep;
}

}  // namespace celldiff
