#pragma once

// Analysis of the operator (V F)(x) = e^{-E(F)} e^{-x} on F: [0, lambda/2] ->
// [0, 1], E(F) = integral of F, which governs the distribution functions of
// the edge-cover bracket values, and of the minimum-matching variant
// (V F)(x) = exp(-int_{-x}^{lambda/2} F). The first closes exactly over the
// one-parameter family c*e^{-x}, so its iteration is a scalar recursion with
// no discretization error; the second needs a genuine grid.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sparseopt {

// Unique root of A = e^{-A} (1 - e^{-lambda/2}); lambda may be +inf, giving
// the root of A = e^{-A}. Newton from 0 (the map g(A) = A - e^{-A} c has
// g' >= 1). Iterates to machine precision; `tol` is the residual guarantee
// checked on exit.
inline double fixed_point_A(double lambda, double tol = 1e-12) {
    if (!(lambda > 0.0)) throw std::invalid_argument("fixed_point_A: lambda must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("fixed_point_A: tol must be > 0");
    const double c = std::isinf(lambda) ? 1.0 : -std::expm1(-lambda / 2.0);
    double a = 0.0;
    for (int it = 0; it < 100; ++it) {
        double e = c * std::exp(-a);
        double g = a - e;
        double step = g / (1.0 + e);
        a -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(a))) break;
    }
    if (std::abs(a - c * std::exp(-a)) > tol)
        throw std::logic_error("fixed_point_A: residual above tolerance");
    return a;
}

struct ScalarIterate {
    int k = 0;
    double a_k = 0.0; // E(F_k)
    double b_k = 0.0; // E(G_k)
};

// Exact scalar closure of the alternating iteration F_{k+1} = V G_k,
// G_{k+1} = V F_k: with phi(x) = e^{-x}(1 - e^{-lambda/2}),
// a_{k+1} = phi(b_k) and b_{k+1} = phi(a_k), from a_0 = 0, b_0 = lambda/2.
inline std::vector<ScalarIterate> scalar_iteration(double lambda, int k_max) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scalar_iteration: lambda must be > 0");
    if (k_max < 1) throw std::invalid_argument("scalar_iteration: k_max must be >= 1");
    const double c = -std::expm1(-lambda / 2.0);
    auto phi = [c](double x) { return c * std::exp(-x); };
    std::vector<ScalarIterate> out;
    out.reserve(k_max + 1);
    out.push_back({0, 0.0, lambda / 2.0});
    for (int k = 1; k <= k_max; ++k) {
        double a = phi(out.back().b_k);
        double b = phi(out.back().a_k);
        out.push_back({k, a, b});
    }
    return out;
}

// Distribution functions recovered from the scalar closure, for k >= 1:
// F_k(x) = e^{-b_{k-1}} e^{-x}, G_k(x) = e^{-a_{k-1}} e^{-x}.
inline double scalar_F(const std::vector<ScalarIterate>& it, int k, double x) {
    if (k < 1 || k >= static_cast<int>(it.size()))
        throw std::invalid_argument("scalar_F: k out of range");
    return std::exp(-it[k - 1].b_k) * std::exp(-x);
}

inline double scalar_G(const std::vector<ScalarIterate>& it, int k, double x) {
    if (k < 1 || k >= static_cast<int>(it.size()))
        throw std::invalid_argument("scalar_G: k out of range");
    return std::exp(-it[k - 1].a_k) * std::exp(-x);
}

struct ConvergenceRow {
    int k = 0;
    double a_k = 0.0, b_k = 0.0;
    double gap_b = 0.0, bound_b = 0.0; // b_k - A  vs  lambda e^{-floor(k/2) A}
    double gap_a = 0.0, bound_a = 0.0; // A - a_k  vs  A e^{-floor(k/2) A}
    bool pass = false;
};

struct ConvergenceReport {
    double lambda = 0.0;
    double a_fixed = 0.0;
    std::vector<ConvergenceRow> rows;
    bool all_pass = false;
    bool sandwich_ok = false;      // a_k <= A <= b_k for all k
    double ratio_measured = 0.0;   // (b_{k+2}-A)/(b_k-A) sampled at gap ~ 1e-8
    double ratio_expected = 0.0;   // A^2, the derivative of phi(phi(.)) at A
};

// Verifies the displayed exponential-convergence bounds for every k <= k_max
// and measures the empirical two-step contraction ratio.
inline ConvergenceReport convergence_bound_check(double lambda, int k_max) {
    if (k_max < 2) throw std::invalid_argument("convergence_bound_check: k_max must be >= 2");
    ConvergenceReport rep;
    rep.lambda = lambda;
    rep.a_fixed = fixed_point_A(lambda);
    rep.ratio_expected = rep.a_fixed * rep.a_fixed;
    auto iters = scalar_iteration(lambda, k_max);
    rep.all_pass = true;
    rep.sandwich_ok = true;
    const double a = rep.a_fixed;
    for (const auto& it : iters) {
        ConvergenceRow row;
        row.k = it.k;
        row.a_k = it.a_k;
        row.b_k = it.b_k;
        row.gap_b = it.b_k - a;
        row.gap_a = a - it.a_k;
        double decay = std::exp(-std::floor(it.k / 2.0) * a);
        row.bound_b = lambda * decay;
        row.bound_a = a * decay;
        row.pass = row.gap_b <= row.bound_b && row.gap_a <= row.bound_a;
        rep.all_pass = rep.all_pass && row.pass;
        rep.sandwich_ok = rep.sandwich_ok && it.a_k <= a && a <= it.b_k;
        rep.rows.push_back(row);
    }
    // Measure the ratio where the gap is far above rounding noise yet small
    // enough that the linearization at the fixed point dominates.
    double best_dist = std::numeric_limits<double>::infinity();
    rep.ratio_measured = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k + 2 < iters.size(); ++k) {
        double g0 = iters[k].b_k - a;
        double g2 = iters[k + 2].b_k - a;
        if (g0 < 1e-10 || g0 > 1e-6) continue;
        double dist = std::abs(std::log10(g0) + 8.0);
        if (dist < best_dist) {
            best_dist = dist;
            rep.ratio_measured = g2 / g0;
        }
    }
    return rep;
}

// F on a uniform grid over [lo, hi], values in [0, 1].
struct GridFn {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;

    static GridFn constant(double lo, double hi, int m, double value) {
        if (m < 2) throw std::invalid_argument("GridFn: m must be >= 2");
        GridFn f;
        f.lo = lo;
        f.hi = hi;
        f.values.assign(m, value);
        return f;
    }

    double step() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
};

// One application of the edge-cover operator on a grid over [0, lambda/2]
// (used by property tests; production iteration is the scalar closure).
inline GridFn apply_operator_ec(const GridFn& f, double lambda) {
    const double h = f.step();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < f.values.size(); ++i)
        integral += 0.5 * h * (f.values[i] + f.values[i + 1]);
    GridFn out = f;
    const double scale = std::exp(-integral);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = scale * std::exp(-(f.lo + h * static_cast<double>(i)));
    (void)lambda;
    return out;
}

// One application of the minimum-matching operator
// (V F)(x) = exp(-int_{-x}^{lambda/2} F) on the symmetric grid
// [-lambda/2, lambda/2]. The lower limit -x lands exactly on grid points.
inline GridFn apply_operator_mm(const GridFn& f) {
    const int m = static_cast<int>(f.values.size());
    const double h = f.step();
    // suffix[i] = int_{x_i}^{hi} F by trapezoid.
    std::vector<double> suffix(m, 0.0);
    for (int i = m - 2; i >= 0; --i)
        suffix[i] = suffix[i + 1] + 0.5 * h * (f.values[i] + f.values[i + 1]);
    GridFn out = f;
    for (int j = 0; j < m; ++j) out.values[j] = std::exp(-suffix[m - 1 - j]);
    return out;
}

struct MatchingOperatorReport {
    double lambda = 0.0;
    int m = 0;
    int k_max = 0;
    std::vector<double> gap;   // sup-norm distance between the two iterate families
    double alpha_hat = 0.0;    // fitted per-two-step contraction ratio
    bool contracting = false;  // false flags a non-contracting gap sequence
};

// Iterates the minimum-matching operator from the extreme initial functions
// F == 0 and F == 1 and fits the contraction rate of the sup-norm gap.
// alpha_hat is exp(2 * slope) for the least-squares slope of log gap over the
// last (up to) 20 iterations, skipping gaps below the float floor.
inline MatchingOperatorReport matching_operator_iterate(double lambda, int m, int k_max) {
    if (m < 64) throw std::invalid_argument("matching_operator_iterate: m must be >= 64");
    if (!(lambda > 0.0))
        throw std::invalid_argument("matching_operator_iterate: lambda must be > 0");
    if (k_max < 4) throw std::invalid_argument("matching_operator_iterate: k_max must be >= 4");
    MatchingOperatorReport rep;
    rep.lambda = lambda;
    rep.m = m;
    rep.k_max = k_max;
    GridFn lo_fn = GridFn::constant(-lambda / 2.0, lambda / 2.0, m, 0.0);
    GridFn hi_fn = GridFn::constant(-lambda / 2.0, lambda / 2.0, m, 1.0);
    for (int k = 0; k < k_max; ++k) {
        lo_fn = apply_operator_mm(lo_fn);
        hi_fn = apply_operator_mm(hi_fn);
        double gap = 0.0;
        for (int i = 0; i < m; ++i)
            gap = std::max(gap, std::abs(lo_fn.values[i] - hi_fn.values[i]));
        rep.gap.push_back(gap);
    }
    // Least-squares slope of log(gap) over the last (up to) 20 iterations
    // whose gap sits above the float floor; the first few are skipped as
    // transient.
    std::vector<std::pair<double, double>> usable;
    for (int k = 2; k < k_max; ++k)
        if (rep.gap[k] > 1e-13) usable.push_back({static_cast<double>(k), std::log(rep.gap[k])});
    std::vector<std::pair<double, double>> pts;
    std::size_t first = usable.size() > 20 ? usable.size() - 20 : 0;
    for (std::size_t i = first; i < usable.size(); ++i) pts.push_back(usable[i]);
    if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double nn = static_cast<double>(pts.size());
        double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        rep.alpha_hat = std::exp(2.0 * slope);
        rep.contracting = slope < 0.0;
    } else {
        rep.alpha_hat = 0.0;
        rep.contracting = true; // gap collapsed to the float floor
    }
    return rep;
}

} // namespace sparseopt
