#pragma once

// Monte Carlo harness for the central-limit-theorem experiments: replicate
// generation for the three problem families, standardized KS distance to the
// normal, variance scaling profiles, the edge-cover truncation checks, and
// the neighborhood coupling diagnostics. Replicates are independent tasks
// with per-index derived seeds; all reductions run in index order, so every
// result is identical for any worker count.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "sparseopt/cavity.hpp"
#include "sparseopt/exact.hpp"
#include "sparseopt/parallel.hpp"
#include "sparseopt/sampling.hpp"
#include "sparseopt/stats.hpp"
#include "sparseopt/tree.hpp"

namespace sparseopt {

struct ReplicateRecord {
    std::uint64_t seed = 0;
    int n = 0;
    double lambda = 0.0;
    Problem problem = Problem::MaxWeightMatching;
    double value = 0.0;
};

namespace detail {

// Complete graph with i.i.d. n*Exp(1) weights (the mean-field family).
inline WeightedGraph sample_complete_nexp(int n, std::uint64_t seed) {
    WeightedGraph g = sample_complete_graph(n, WeightDist::exp1(), seed);
    std::vector<WeightedEdge> scaled;
    scaled.reserve(g.edges().size());
    for (const auto& e : g.edges())
        scaled.push_back({e.u, e.v, e.w * static_cast<double>(n)});
    return WeightedGraph(n, std::move(scaled));
}

inline double solve_replicate(Problem problem, int n, double lambda, std::uint64_t seed) {
    switch (problem) {
        case Problem::MaxWeightMatching: {
            auto g = sample_er_graph(n, lambda / n, WeightDist::exp1(), seed);
            return max_weight_matching(g).value;
        }
        case Problem::DilutedMinMatching: {
            auto g = sample_kn_lambda(n, lambda, seed);
            return diluted_min_matching(g, lambda).value;
        }
        case Problem::DilutedEdgeCover: {
            auto g = sample_kn_lambda(n, lambda, seed);
            return diluted_edge_cover(g, lambda).value;
        }
        case Problem::EdgeCover: {
            auto g = sample_complete_nexp(n, seed);
            return edge_cover(g).value;
        }
    }
    throw std::logic_error("solve_replicate: bad problem");
}

} // namespace detail

// One row per replicate; replicate i uses seed derive_seed(master_seed, i).
// MWM runs on G(n, lambda/n) with Exp(1) weights, DMM and EC_lambda on
// K_n(lambda), plain EC on the complete graph with n Exp(1) weights.
inline std::vector<ReplicateRecord> run_replicates(Problem problem, int n, double lambda,
                                                   int reps, std::uint64_t master_seed,
                                                   int workers = 1) {
    if (reps < 2) throw std::invalid_argument("run_replicates: reps must be >= 2");
    if (problem != Problem::MaxWeightMatching && !(lambda > 0.0))
        throw std::invalid_argument("run_replicates: lambda must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("run_replicates: lambda must be >= 0");
    std::vector<ReplicateRecord> out(reps);
    parallel_for_indexed(reps, workers, [&](std::size_t i) {
        std::uint64_t seed = derive_seed(master_seed, i);
        out[i] = {seed, n, lambda, problem, detail::solve_replicate(problem, n, lambda, seed)};
    });
    return out;
}

struct KSReport {
    int n_reps = 0;
    double ks_distance = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

// Sup-distance between the empirical CDF of the standardized values and the
// standard normal CDF. Standardization uses the sample mean and sample SD.
inline KSReport ks_to_normal(const std::vector<double>& values) {
    if (values.size() < 50) throw std::invalid_argument("ks_to_normal: need >= 50 records");
    auto s = summarize(values);
    if (!(s.sd > 0.0)) throw std::invalid_argument("ks_to_normal: degenerate sample (sd = 0)");
    std::vector<double> z;
    z.reserve(values.size());
    for (double v : values) z.push_back((v - s.mean) / s.sd);
    KSReport rep;
    rep.n_reps = static_cast<int>(values.size());
    rep.ks_distance = ks_distance(std::move(z), [](double t) { return normal_cdf(t); });
    rep.mean = s.mean;
    rep.sd = s.sd;
    return rep;
}

inline KSReport ks_to_normal(const std::vector<ReplicateRecord>& records) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) values.push_back(r.value);
    return ks_to_normal(values);
}

struct VarianceRow {
    int n = 0;
    double var = 0.0;
    double var_over_n = 0.0;
};

// Unbiased sample variance of f(G_n) for each n in the ladder, reported as
// Var/n (the CLT regime has this bounded away from zero).
inline std::vector<VarianceRow> variance_profile(Problem problem, double lambda,
                                                 const std::vector<int>& n_list, int reps,
                                                 std::uint64_t master_seed, int workers = 1) {
    std::vector<VarianceRow> out;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        auto records = run_replicates(problem, n_list[idx], lambda, reps,
                                      derive_seed(master_seed, idx), workers);
        std::vector<double> values;
        values.reserve(records.size());
        for (const auto& r : records) values.push_back(r.value);
        auto s = summarize(values);
        out.push_back({n_list[idx], s.var, s.var / static_cast<double>(n_list[idx])});
    }
    return out;
}

struct TruncationReport {
    int n = 0;
    int reps = 0;
    double lambda_log_n = 0.0; // 8 log n
    int eq_4k = 0;             // replicates with EC = EC_{4K}
    int eq_log_n = 0;          // replicates with EC = EC_{lambda_n}
    double max_diff_4k = 0.0;
};

// On complete graphs with n Exp(1) weights: K is the smallest bound with an
// incident edge of weight <= K at every vertex; the optimal cover then never
// uses an edge above 2K and EC_{4K} = EC. Also tallies how often the
// 8 log n truncation already suffices.
inline TruncationReport ec_truncation_check(int n, int reps, std::uint64_t master_seed,
                                            int workers = 1) {
    if (n < 2 || n > 300) throw std::invalid_argument("ec_truncation_check: need 2 <= n <= 300");
    TruncationReport rep;
    rep.n = n;
    rep.reps = reps;
    rep.lambda_log_n = 8.0 * std::log(static_cast<double>(n));
    std::vector<char> ok4k(reps, 0), oklog(reps, 0);
    std::vector<double> diffs(reps, 0.0);
    parallel_for_indexed(reps, workers, [&](std::size_t i) {
        auto g = detail::sample_complete_nexp(n, derive_seed(master_seed, i));
        double ec = edge_cover(g).value;
        double cap = 0.0;
        for (int v = 0; v < n; ++v) cap = std::max(cap, *g.min_incident_weight(v));
        double ec4k = diluted_edge_cover(g, 4.0 * cap).value;
        diffs[i] = std::abs(ec - ec4k);
        ok4k[i] = diffs[i] <= 1e-9;
        double eclog = diluted_edge_cover(g, rep.lambda_log_n).value;
        oklog[i] = std::abs(ec - eclog) <= 1e-9;
    });
    for (int i = 0; i < reps; ++i) {
        rep.eq_4k += ok4k[i];
        rep.eq_log_n += oklog[i];
        rep.max_diff_4k = std::max(rep.max_diff_4k, diffs[i]);
    }
    return rep;
}

struct TreeProbReport {
    int n = 0, k = 0, reps = 0;
    double lambda = 0.0;
    double p_tree = 0.0;
    double se = 0.0;
};

// Monte Carlo frequency of B_k(0, G_n) being a tree, with binomial SE.
inline TreeProbReport tree_probability(int n, double lambda, int k, int reps,
                                       std::uint64_t master_seed, int workers = 1) {
    if (reps < 100) throw std::invalid_argument("tree_probability: reps must be >= 100");
    std::vector<char> is_tree(reps, 0);
    parallel_for_indexed(reps, workers, [&](std::size_t i) {
        auto g = sample_er_graph(n, lambda / n, WeightDist::exp1(), derive_seed(master_seed, i));
        is_tree[i] = neighborhood(g, 0, k).is_tree;
    });
    TreeProbReport rep;
    rep.n = n;
    rep.k = k;
    rep.reps = reps;
    rep.lambda = lambda;
    int cnt = 0;
    for (char c : is_tree) cnt += c;
    rep.p_tree = static_cast<double>(cnt) / reps;
    rep.se = binomial_se(rep.p_tree, reps);
    return rep;
}

enum class CouplingStatistic { RootDegree, NodeCount };

struct CouplingTvReport {
    int n = 0, k = 0, reps = 0;
    double lambda = 0.0;
    double tv = 0.0;
    double bootstrap_se = 0.0;
};

namespace detail {

inline double tv_between(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<int, double> pa, pb;
    for (int x : a) pa[x] += 1.0 / static_cast<double>(a.size());
    for (int x : b) pb[x] += 1.0 / static_cast<double>(b.size());
    double tv = 0.0;
    for (const auto& [x, p] : pa) {
        auto it = pb.find(x);
        tv += std::abs(p - (it == pb.end() ? 0.0 : it->second));
    }
    for (const auto& [x, q] : pb)
        if (pa.find(x) == pa.end()) tv += q;
    return tv / 2.0;
}

} // namespace detail

// Empirical total-variation distance between an integer statistic of
// B_k(0, G_n) and the same statistic of the Galton-Watson tree T(k, lambda).
// The SE is a nonparametric bootstrap over both samples.
inline CouplingTvReport coupling_statistic_tv(int n, double lambda, int k, int reps,
                                              CouplingStatistic stat, std::uint64_t master_seed,
                                              int workers = 1, int bootstrap = 200) {
    if (reps < 1000) throw std::invalid_argument("coupling_statistic_tv: reps must be >= 1000");
    std::vector<int> graph_stat(reps), tree_stat(reps);
    parallel_for_indexed(reps, workers, [&](std::size_t i) {
        std::uint64_t s = derive_seed(master_seed, i);
        auto g = sample_er_graph(n, lambda / n, WeightDist::exp1(), derive_seed(s, 1));
        auto nb = neighborhood(g, 0, k);
        auto t = sample_gw_tree(k, lambda, WeightDist::exp1(), derive_seed(s, 2));
        if (stat == CouplingStatistic::RootDegree) {
            graph_stat[i] = k == 0 ? 0 : nb.subgraph.degree(0);
            tree_stat[i] = k == 0 ? 0 : t.child_count(0);
        } else {
            graph_stat[i] = nb.subgraph.active_count();
            tree_stat[i] = t.size();
        }
    });
    CouplingTvReport rep;
    rep.n = n;
    rep.k = k;
    rep.reps = reps;
    rep.lambda = lambda;
    rep.tv = detail::tv_between(graph_stat, tree_stat);
    std::vector<double> boots(bootstrap);
    parallel_for_indexed(bootstrap, workers, [&](std::size_t b) {
        SplitMix64 rng(derive_seed(derive_seed(master_seed, StreamTag::Bootstrap), b));
        std::vector<int> ga(reps), ta(reps);
        for (int i = 0; i < reps; ++i) {
            ga[i] = graph_stat[rng.next() % reps];
            ta[i] = tree_stat[rng.next() % reps];
        }
        boots[b] = detail::tv_between(ga, ta);
    });
    rep.bootstrap_se = summarize(boots).sd;
    return rep;
}

struct IdentityReport {
    int n = 0, reps = 0;
    double lambda = 0.0;
    int passes = 0;
    double max_abs_diff = 0.0;
};

// Checks that the perturbation difference EC_lambda(G) - EC_lambda(G^e)
// equals its four-term decomposition into subset cavity values, both sides
// computed independently by the exhaustive subset oracle.
inline IdentityReport perturbation_identity_check(int n, double lambda, int reps,
                                                  std::uint64_t master_seed, int workers = 1) {
    if (n > 8) throw std::invalid_argument("perturbation_identity_check: n must be <= 8");
    const double p = -std::expm1(-lambda / n);
    const auto dist = WeightDist::trunc_scaled_exp(n, lambda);
    std::vector<double> diffs(reps);
    parallel_for_indexed(reps, workers, [&](std::size_t i) {
        std::uint64_t s = derive_seed(master_seed, i);
        auto g = sample_kn_lambda(n, lambda, derive_seed(s, 1));
        auto env = draw_edge_env(g, 0, 1, p, dist, derive_seed(s, 2));
        auto ge = resample_edge(g, env);
        std::vector<int> V, Vv;
        for (int v = 0; v < n; ++v) V.push_back(v);
        for (int v = 1; v < n; ++v) Vv.push_back(v);
        auto h = [&](const WeightedGraph& gr, const std::vector<int>& S, int v) {
            std::vector<int> s_minus;
            for (int x : S)
                if (x != v) s_minus.push_back(x);
            return diluted_edge_cover_subset(gr, lambda, S) -
                   diluted_edge_cover_subset(gr, lambda, s_minus);
        };
        double lhs = diluted_edge_cover_subset(g, lambda, V) -
                     diluted_edge_cover_subset(ge, lambda, V);
        double rhs = h(g, V, 0) - h(ge, V, 0) + h(g, Vv, 1) - h(ge, Vv, 1);
        diffs[i] = std::abs(lhs - rhs);
    });
    IdentityReport rep;
    rep.n = n;
    rep.reps = reps;
    rep.lambda = lambda;
    for (double d : diffs) {
        if (d <= 1e-9) ++rep.passes;
        rep.max_abs_diff = std::max(rep.max_abs_diff, d);
    }
    return rep;
}

} // namespace sparseopt
