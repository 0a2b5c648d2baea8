#pragma once

// Recursive local approximations on rooted trees: the max-weight-matching
// cavity value h_k with its parity bracket, the bracket recursions for the
// diluted matching and diluted edge cover, the four-case local approximation
// of the edge-cover perturbation, and Monte Carlo estimation of the
// approximation gap delta_k. All recursions run as one reverse pass over the
// BFS arena, so deep skinny trees cost no stack.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sparseopt/exact.hpp"
#include "sparseopt/parallel.hpp"
#include "sparseopt/sampling.hpp"
#include "sparseopt/tree.hpp"

namespace sparseopt {

// h_k values for maximum weight matching: leaves 0, otherwise
// max(0, max over children of (edge weight - child value)).
inline std::vector<double> mwm_cavity_values(const RootedTree& t) {
    std::vector<double> val(t.size(), 0.0);
    for (int i = t.size() - 1; i >= 0; --i) {
        double best = 0.0;
        for (int c = t.child_begin(i); c < t.child_end(i); ++c)
            best = std::max(best, t.parent_weight(c) - val[c]);
        val[i] = best;
    }
    return val;
}

inline double mwm_cavity(const RootedTree& t) { return mwm_cavity_values(t)[0]; }

struct CavityBracket {
    double lower = 0.0;
    double upper = 0.0;
    int k = 0;
    Problem problem = Problem::MaxWeightMatching;
};

// Parity bracket for h(G, v) = M(G) - M(G - v) from a depth-k tree
// neighborhood: even truncations bound from below, odd ones from above.
// i_U is the largest odd depth <= k and i_L = i_U - 1.
inline CavityBracket mwm_bracket(const Neighborhood& nb) {
    if (!nb.is_tree || !nb.as_tree) throw std::invalid_argument("mwm_bracket: need a tree");
    if (nb.k < 1) throw std::invalid_argument("mwm_bracket: k must be >= 1");
    const int i_u = (nb.k % 2 == 1) ? nb.k : nb.k - 1;
    const int i_l = i_u - 1;
    CavityBracket out;
    out.k = nb.k;
    out.problem = Problem::MaxWeightMatching;
    out.lower = mwm_cavity(nb.as_tree->truncate_to_depth(i_l));
    out.upper = mwm_cavity(nb.as_tree->truncate_to_depth(i_u));
    return out;
}

struct BracketValues {
    std::vector<double> lower;
    std::vector<double> upper;
};

// Lower/upper recursions for the diluted edge cover on a tree of depth <= k.
// Boundary nodes at depth exactly k carry (0, lambda/2) seeds when k is even
// and (lambda/2, 0) when k is odd; leaves strictly inside carry lambda/2 on
// both sides (an exposed vertex is its own penalty). Internal nodes:
// max(0, min(lambda/2, min over children of (weight - child value))).
inline BracketValues ec_cavity_values(const RootedTree& t, int k, double lambda) {
    if (t.depth() > k) throw std::invalid_argument("ec_cavity_values: tree deeper than k");
    if (!(lambda > 0.0)) throw std::invalid_argument("ec_cavity_values: lambda must be > 0");
    const double half = lambda / 2.0;
    const bool even = (k % 2 == 0);
    BracketValues out;
    out.lower.resize(t.size());
    out.upper.resize(t.size());
    for (int i = t.size() - 1; i >= 0; --i) {
        if (t.depth(i) == k) {
            out.lower[i] = even ? 0.0 : half;
            out.upper[i] = even ? half : 0.0;
        } else if (t.child_count(i) == 0) {
            out.lower[i] = half;
            out.upper[i] = half;
        } else {
            double mlo = half, mhi = half;
            for (int c = t.child_begin(i); c < t.child_end(i); ++c) {
                mlo = std::min(mlo, t.parent_weight(c) - out.lower[c]);
                mhi = std::min(mhi, t.parent_weight(c) - out.upper[c]);
            }
            out.lower[i] = std::max(0.0, mlo);
            out.upper[i] = std::max(0.0, mhi);
        }
    }
    return out;
}

inline CavityBracket ec_cavity_bracket(const RootedTree& t, int k, double lambda) {
    auto vals = ec_cavity_values(t, k, lambda);
    return {vals.lower[0], vals.upper[0], k, Problem::DilutedEdgeCover};
}

// Bracket recursion for the lambda-diluted matching cavity value
// h_lambda(G, v) = M_lambda(G) - M_lambda(G - v), which lives in
// [-lambda/2, lambda/2]. Structure mirrors the edge-cover recursion with the
// boundary seeds at the range extremes and no clamp at zero:
// min(lambda/2, min over children of (weight - child value)).
inline BracketValues dmm_cavity_values(const RootedTree& t, int k, double lambda) {
    if (t.depth() > k) throw std::invalid_argument("dmm_cavity_values: tree deeper than k");
    if (!(lambda > 0.0)) throw std::invalid_argument("dmm_cavity_values: lambda must be > 0");
    const double half = lambda / 2.0;
    const bool even = (k % 2 == 0);
    BracketValues out;
    out.lower.resize(t.size());
    out.upper.resize(t.size());
    for (int i = t.size() - 1; i >= 0; --i) {
        if (t.depth(i) == k) {
            out.lower[i] = even ? -half : half;
            out.upper[i] = even ? half : -half;
        } else if (t.child_count(i) == 0) {
            out.lower[i] = half;
            out.upper[i] = half;
        } else {
            double mlo = half, mhi = half;
            for (int c = t.child_begin(i); c < t.child_end(i); ++c) {
                double w = t.parent_weight(c);
                if (!(w >= 0.0 && w <= lambda))
                    throw std::invalid_argument("dmm_cavity_values: weight outside [0, lambda]");
                mlo = std::min(mlo, w - out.lower[c]);
                mhi = std::min(mhi, w - out.upper[c]);
            }
            out.lower[i] = mlo;
            out.upper[i] = mhi;
        }
    }
    return out;
}

inline CavityBracket dmm_cavity_bracket(const RootedTree& t, int k, double lambda) {
    auto vals = dmm_cavity_values(t, k, lambda);
    return {vals.lower[0], vals.upper[0], k, Problem::DilutedMinMatching};
}

struct LocalApproxPair {
    double la_lower = 0.0;
    double la_upper = 0.0;
    int k = 0;
    bool b_e = false;
    bool b_e_prime = false;
};

namespace detail {

// Four-case local approximation of EC_lambda(G) - EC_lambda(G^e), e = (v, u),
// from the two depth-k tree neighborhoods of v. u_in_* is the arena index of
// u as a root child (only needed when the edge is present on that side).
inline LocalApproxPair ec_local_approx_core(const BracketValues& a, int u_in_a,
                                            const BracketValues& b, int u_in_b, bool be,
                                            bool bep, double we, double wep, int k) {
    LocalApproxPair out;
    out.k = k;
    out.b_e = be;
    out.b_e_prime = bep;
    double lo = a.lower[0] - b.upper[0];
    double hi = a.upper[0] - b.lower[0];
    if (be && !bep) {
        lo += std::min(a.upper[u_in_a], we) - a.lower[u_in_a];
        hi += std::min(a.lower[u_in_a], we) - a.upper[u_in_a];
    } else if (!be && bep) {
        lo += b.upper[u_in_b] - std::min(b.lower[u_in_b], wep);
        hi += b.lower[u_in_b] - std::min(b.upper[u_in_b], wep);
    } else if (be && bep) {
        lo += std::min(a.upper[u_in_a], we) - std::min(b.lower[u_in_b], wep);
        hi += std::min(a.lower[u_in_a], we) - std::min(b.upper[u_in_b], wep);
    }
    out.la_lower = lo;
    out.la_upper = hi;
    return out;
}

} // namespace detail

// LA^L_k / LA^U_k for the perturbation at env's edge. Both neighborhoods must
// be tree-shaped, rooted at v = env.u; the other endpoint env.v is located in
// each tree by its vertex label.
inline LocalApproxPair ec_local_approx(const Neighborhood& bk, const Neighborhood& bk_prime,
                                       const EdgeEnv& env, double lambda) {
    if (!bk.is_tree || !bk.as_tree || !bk_prime.is_tree || !bk_prime.as_tree)
        throw std::invalid_argument("ec_local_approx: need tree neighborhoods");
    if (bk.root != env.u || bk_prime.root != env.u)
        throw std::invalid_argument("ec_local_approx: neighborhoods must be rooted at env.u");
    if (bk.k != bk_prime.k) throw std::invalid_argument("ec_local_approx: depth mismatch");
    const int k = bk.k;
    auto va = ec_cavity_values(*bk.as_tree, k, lambda);
    auto vb = ec_cavity_values(*bk_prime.as_tree, k, lambda);
    int u_in_a = env.present ? bk.as_tree->find_root_child_by_orig(env.v) : -1;
    int u_in_b = env.present_prime ? bk_prime.as_tree->find_root_child_by_orig(env.v) : -1;
    if (env.present && u_in_a < 0)
        throw std::invalid_argument("ec_local_approx: edge endpoint not a root child of B_k");
    if (env.present_prime && u_in_b < 0)
        throw std::invalid_argument("ec_local_approx: edge endpoint not a root child of B_k'");
    return detail::ec_local_approx_core(va, u_in_a, vb, u_in_b, env.present, env.present_prime,
                                        env.w, env.w_prime, k);
}

struct DeltaKEstimate {
    int k = 0;
    double lambda = 0.0;
    double mean_sq = 0.0;
    double std_err = 0.0;
    int n_samples = 0;
};

namespace detail {

inline DeltaKEstimate summarize_max(const std::vector<double>& sq1,
                                    const std::vector<double>& sq2, int k, double lambda) {
    auto mean_se = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - m) * (x - m);
        double sd = xs.size() > 1 ? std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0)) : 0.0;
        return std::pair(m, sd / std::sqrt(static_cast<double>(xs.size())));
    };
    auto [m1, se1] = mean_se(sq1);
    auto [m2, se2] = mean_se(sq2);
    DeltaKEstimate out;
    out.k = k;
    out.lambda = lambda;
    out.n_samples = static_cast<int>(sq1.size());
    if (m1 >= m2) {
        out.mean_sq = m1;
        out.std_err = se1;
    } else {
        out.mean_sq = m2;
        out.std_err = se2;
    }
    return out;
}

} // namespace detail

// Monte Carlo estimate of delta_k, the mean squared gap between the upper and
// lower local approximations on (tilted) Galton-Watson trees; the maximum of
// the two edge-direction estimates.
//
// For the edge cover, each sample draws (T_k, T'_{k-1}, bridge weight) and
// evaluates the four-case formula on the tilted pairs (T~, T) and (T, T~).
// For maximum weight matching, k is the parity index r: the gap is
// h_{2r+1} - h_{2r} on nested truncations of one tree, and its tilted
// variant.
inline DeltaKEstimate estimate_delta_k(Problem problem, int k, double lambda,
                                       const WeightDist& dist, int n_samples,
                                       std::uint64_t seed, int workers = 1) {
    if (n_samples < 100) throw std::invalid_argument("estimate_delta_k: need >= 100 samples");
    if (k < 1) throw std::invalid_argument("estimate_delta_k: k must be >= 1");
    std::vector<double> sq1(n_samples), sq2(n_samples);

    if (problem == Problem::DilutedEdgeCover || problem == Problem::EdgeCover) {
        parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
            std::uint64_t s = derive_seed(seed, i);
            RootedTree base = sample_gw_tree(k, lambda, dist, derive_seed(s, 1));
            RootedTree attached = sample_gw_tree(k - 1, lambda, dist, derive_seed(s, 2));
            SplitMix64 br(derive_seed(s, StreamTag::BridgeWeight));
            double ell = dist.sample(br);
            TiltedTree tilted = make_tilted_tree(base, attached, ell);
            auto vt = ec_cavity_values(tilted.combined, k, lambda);
            auto vb = ec_cavity_values(base, k, lambda);
            auto d1 = detail::ec_local_approx_core(vt, tilted.attached_root, vb, -1, true,
                                                   false, ell, 0.0, k);
            auto d2 = detail::ec_local_approx_core(vb, -1, vt, tilted.attached_root, false,
                                                   true, 0.0, ell, k);
            double g1 = d1.la_upper - d1.la_lower;
            double g2 = d2.la_upper - d2.la_lower;
            sq1[i] = g1 * g1;
            sq2[i] = g2 * g2;
        });
        return detail::summarize_max(sq1, sq2, k, lambda);
    }

    if (problem != Problem::MaxWeightMatching)
        throw std::invalid_argument("estimate_delta_k: problem must be MWM or EC");
    const int r = k;
    parallel_for_indexed(n_samples, workers, [&](std::size_t i) {
        std::uint64_t s = derive_seed(seed, i);
        RootedTree t_hi = sample_gw_tree(2 * r + 1, lambda, dist, derive_seed(s, 1));
        RootedTree t_lo = t_hi.truncate_to_depth(2 * r);
        double x = mwm_cavity(t_hi) - mwm_cavity(t_lo);
        RootedTree attached = sample_gw_tree(2 * r, lambda, dist, derive_seed(s, 2));
        SplitMix64 br(derive_seed(s, StreamTag::BridgeWeight));
        double ell = dist.sample(br);
        TiltedTree tilted = make_tilted_tree(t_hi, attached, ell);
        double xt = mwm_cavity(tilted.combined) -
                    mwm_cavity(tilted.combined.truncate_to_depth(2 * r));
        sq1[i] = x * x;
        sq2[i] = xt * xt;
    });
    return detail::summarize_max(sq1, sq2, r, lambda);
}

struct DiagnosticBounds {
    double epsilon_k = 0.0;
    double rho_k = 0.0;
    double lambda = 0.0, lambda_n = 0.0, d_tv = 0.0, c0 = 0.0;
    int k = 0;
    double n = 0.0;
};

// The two error terms of the main convergence bound, evaluated verbatim; C0
// is a free diagnostic knob since the underlying constant is not specified.
inline DiagnosticBounds diagnostic_bounds(double lambda, double lambda_n, int k, double n,
                                          double d_tv, double c0) {
    if (!(lambda > 0.0) || !(lambda_n > 0.0) || !(n > 0.0) || k <= 0 || !(c0 > 0.0))
        throw std::invalid_argument("diagnostic_bounds: parameters must be positive");
    DiagnosticBounds out;
    out.lambda = lambda;
    out.lambda_n = lambda_n;
    out.k = k;
    out.n = n;
    out.d_tv = d_tv;
    out.c0 = c0;
    out.epsilon_k =
        std::pow(2.0 * lambda + 3.0, k) / std::cbrt(n) +
        c0 * std::pow(lambda_n + 1.0, k) / std::min(lambda, 1.0) *
            (std::abs(lambda_n - lambda) + d_tv + lambda * lambda / (2.0 * n));
    out.rho_k = std::min(std::pow(lambda_n + c0, 2.0 * k + c0) / n, 1.0);
    return out;
}

} // namespace sparseopt
