#pragma once

// The acceptance battery: ten statistically- and oracle-grounded checks, one
// per headline property of the library. Each criterion prints a single
// pass/fail line; tolerances are fixed here, not tunable.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sparseopt/cavity.hpp"
#include "sparseopt/clt.hpp"
#include "sparseopt/exact.hpp"
#include "sparseopt/parallel.hpp"
#include "sparseopt/sampling.hpp"
#include "sparseopt/stats.hpp"
#include "sparseopt/vlambda.hpp"

namespace sparseopt::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

constexpr double kTol = 1e-9;

inline WeightedGraph oracle_instance(SplitMix64& rng, int max_n) {
    int n = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_n - 1));
    double p = 0.15 + 0.8 * rng.next_unit();
    return sample_er_graph(n, p, WeightDist::exp1(), rng.next());
}

// Criterion 1: reduction solvers equal brute force on >= 500 instances per
// problem (n <= 8, mixed densities, lambda in {0.5, 2, 8}), to 1e-9.
inline CriterionResult oracle_equivalence() {
    CriterionResult res{1, "oracle equivalence (solvers vs brute force)", true, ""};
    const double lambdas[3] = {0.5, 2.0, 8.0};
    int fails = 0, total = 0;
    SplitMix64 rng(1001);
    for (int rep = 0; rep < 500; ++rep) {
        double lam = lambdas[rep % 3];
        ++total;
        // Matching problems enumerate vertex subsets (n <= 8 is cheap).
        auto g = oracle_instance(rng, 8);
        if (std::abs(max_weight_matching(g).value -
                     brute_force(Problem::MaxWeightMatching, g)) > kTol)
            ++fails;
        if (std::abs(diluted_min_matching(g, lam).value -
                     brute_force(Problem::DilutedMinMatching, g, lam)) > kTol)
            ++fails;
        // Cover problems enumerate edge subsets; n <= 7 keeps even the
        // complete instance under the 24-edge cap.
        auto gc = oracle_instance(rng, 7);
        if (std::abs(diluted_edge_cover(gc, lam).value -
                     brute_force(Problem::DilutedEdgeCover, gc, lam)) > kTol)
            ++fails;
        bool feasible = true;
        for (int v = 0; v < gc.n(); ++v)
            if (gc.degree(v) == 0) feasible = false;
        if (feasible &&
            std::abs(edge_cover(gc).value - brute_force(Problem::EdgeCover, gc)) > kTol)
            ++fails;
    }
    res.pass = fails == 0;
    std::ostringstream d;
    d << total << " instances per problem, " << fails << " mismatches";
    res.detail = d.str();
    return res;
}

// Criterion 2: on tree-shaped neighborhoods the exact cavity difference lies
// in [lower, upper]; 350 instances per k in {1,2,3} per problem, 100%.
inline CriterionResult bracket_soundness() {
    CriterionResult res{2, "bracket soundness (A1 at desk scale)", true, ""};
    int violations = 0, total = 0;
    const double lambda = 2.0;
    SplitMix64 rng(2002);
    for (int k : {1, 2, 3}) {
        // Maximum weight matching on G(40, lambda/40).
        for (int got = 0; got < 350;) {
            auto g = sample_er_graph(40, lambda / 40, WeightDist::exp1(), rng.next());
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = mwm_bracket(nb);
            double h = max_weight_matching(g).value -
                       max_weight_matching(delete_vertices(g, {0})).value;
            if (!(h >= br.lower - kTol && h <= br.upper + kTol)) ++violations;
            ++got;
            ++total;
        }
        // Diluted matching on K_40(lambda).
        for (int got = 0; got < 350;) {
            auto g = sample_kn_lambda(40, lambda, rng.next());
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = dmm_cavity_bracket(*nb.as_tree, k, lambda);
            double h = diluted_min_matching(g, lambda).value -
                       diluted_min_matching(delete_vertices(g, {0}), lambda).value;
            if (!(h >= br.lower - kTol && h <= br.upper + kTol)) ++violations;
            ++got;
            ++total;
        }
        // Diluted edge cover on K_9(lambda) against the subset oracle.
        for (int got = 0; got < 350;) {
            auto g = sample_kn_lambda(9, lambda, rng.next());
            if (g.edge_count() > 16) continue;
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = ec_cavity_bracket(*nb.as_tree, k, lambda);
            std::vector<int> all, rest;
            for (int v = 0; v < g.n(); ++v) all.push_back(v);
            for (int v = 1; v < g.n(); ++v) rest.push_back(v);
            double h = diluted_edge_cover_subset(g, lambda, all) -
                       diluted_edge_cover_subset(g, lambda, rest);
            if (!(h >= br.lower - kTol && h <= br.upper + kTol)) ++violations;
            ++got;
            ++total;
        }
    }
    res.pass = violations == 0;
    std::ostringstream d;
    d << total << " tree instances (3 problems x 3 depths), " << violations << " violations";
    res.detail = d.str();
    return res;
}

// Criterion 3: parity monotonicity of h_k on nested truncations, exact.
inline CriterionResult parity_monotonicity() {
    CriterionResult res{3, "MWM parity monotonicity on nested truncations", true, ""};
    SplitMix64 rng(3003);
    int violations = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        auto t = sample_gw_tree(7, 2.0, WeightDist::exp1(), rng.next());
        double h[8];
        for (int j = 0; j <= 7; ++j) h[j] = mwm_cavity(t.truncate_to_depth(j));
        for (int r = 0; r <= 3; ++r)
            if (h[2 * r] > h[2 * r + 1]) ++violations;
        for (int r = 1; r <= 3; ++r) {
            if (h[2 * r + 1] > h[2 * r - 1]) ++violations;
            if (h[2 * r] < h[2 * r - 2]) ++violations;
        }
    }
    res.pass = violations == 0;
    res.detail = "1000 trees, " + std::to_string(violations) + " violations";
    return res;
}

// Criterion 4: delta_k decay at lambda = 2 with 1e4 samples; nonincreasing
// within 2 combined SE for both problems, and the EC log-slope is negative
// with magnitude at least A_2/2 - 3 SE.
inline CriterionResult delta_k_decay(int workers) {
    CriterionResult res{4, "delta_k decay (A3)", true, ""};
    const double lambda = 2.0;
    const int samples = 10000;
    std::ostringstream d;

    std::vector<DeltaKEstimate> ec;
    for (int k = 1; k <= 8; ++k)
        ec.push_back(estimate_delta_k(Problem::DilutedEdgeCover, k, lambda,
                                      WeightDist::uniform(lambda), samples,
                                      derive_seed(4004, k), workers));
    bool mono_ec = true;
    for (std::size_t i = 1; i < ec.size(); ++i)
        if (ec[i].mean_sq > ec[i - 1].mean_sq +
                                2.0 * std::hypot(ec[i].std_err, ec[i - 1].std_err))
            mono_ec = false;

    std::vector<DeltaKEstimate> mwm;
    for (int r = 1; r <= 4; ++r)
        mwm.push_back(estimate_delta_k(Problem::MaxWeightMatching, r, lambda,
                                       WeightDist::exp1(), samples, derive_seed(4005, r),
                                       workers));
    bool mono_mwm = true;
    for (std::size_t i = 1; i < mwm.size(); ++i)
        if (mwm[i].mean_sq > mwm[i - 1].mean_sq +
                                 2.0 * std::hypot(mwm[i].std_err, mwm[i - 1].std_err))
            mono_mwm = false;

    // Least-squares slope of log delta_k vs k with propagated SEs.
    double xbar = 0.0;
    for (std::size_t i = 0; i < ec.size(); ++i) xbar += ec[i].k;
    xbar /= static_cast<double>(ec.size());
    double sxx = 0.0;
    for (const auto& e : ec) sxx += (e.k - xbar) * (e.k - xbar);
    double slope = 0.0, slope_var = 0.0;
    for (const auto& e : ec) {
        double c = (e.k - xbar) / sxx;
        slope += c * std::log(e.mean_sq);
        double se_log = e.std_err / e.mean_sq;
        slope_var += c * c * se_log * se_log;
    }
    double slope_se = std::sqrt(slope_var);
    double a2 = fixed_point_A(lambda);
    bool slope_ok = slope < 0.0 && (-slope) >= a2 / 2.0 - 3.0 * slope_se;

    res.pass = mono_ec && mono_mwm && slope_ok;
    d << "EC delta_1.." << ec.size() << " mono=" << (mono_ec ? "yes" : "NO")
      << ", MWM r=1..4 mono=" << (mono_mwm ? "yes" : "NO") << ", EC slope "
      << std::setprecision(4) << slope << " (se " << slope_se << ", need <= -"
      << a2 / 2.0 << "+3se)";
    res.detail = d.str();
    return res;
}

// Criterion 5: the scalar operator analysis.
inline CriterionResult vlambda_analysis() {
    CriterionResult res{5, "V_lambda fixed point, sandwich, bounds, rate", true, ""};
    std::ostringstream d;
    bool ok = true;
    double prev_a = -1.0;
    for (double lambda : {0.5, 1.0, 2.0, 8.0, 32.0}) {
        double a = fixed_point_A(lambda, 1e-12);
        double c = -std::expm1(-lambda / 2.0);
        if (std::abs(a - c * std::exp(-a)) >= 1e-12) ok = false;
        if (a <= prev_a) ok = false; // strictly increasing in lambda
        prev_a = a;
        auto rep = convergence_bound_check(lambda, 60);
        if (!rep.all_pass || !rep.sandwich_ok) ok = false;
        if (!(std::abs(rep.ratio_measured - rep.ratio_expected) < 1e-6)) ok = false;
    }
    double a_inf = fixed_point_A(std::numeric_limits<double>::infinity());
    bool inf_ok = std::abs(a_inf - 0.5671432904) <= 1e-9;
    ok = ok && inf_ok;
    res.pass = ok;
    d << "lambda grid {0.5,1,2,8,32}; A_inf = " << std::setprecision(12) << a_inf;
    res.detail = d.str();
    return res;
}

// Criterion 6: the minimum-matching operator sweep reproduces alpha -> 1.
inline CriterionResult matching_operator_sweep() {
    CriterionResult res{6, "minimum-matching operator: alpha_hat increasing", true, ""};
    std::ostringstream d;
    std::vector<double> alphas;
    for (double lambda : {1.0, 4.0, 16.0, 64.0}) {
        auto rep = matching_operator_iterate(lambda, 1024, 120);
        alphas.push_back(rep.alpha_hat);
        d << "alpha(" << lambda << ")=" << std::setprecision(5) << rep.alpha_hat << " ";
    }
    bool increasing = true;
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1])) increasing = false;
    res.pass = increasing && alphas.back() > alphas.front() && alphas.back() < 1.0;
    res.detail = d.str();
    return res;
}

// Criterion 7: EC truncation lemmas on complete graphs.
inline CriterionResult ec_truncation(int workers) {
    CriterionResult res{7, "EC truncation: EC = EC_4K and EC_{8 log n}", true, ""};
    auto r50 = ec_truncation_check(50, 200, 7007, workers);
    auto r100 = ec_truncation_check(100, 200, 7008, workers);
    std::ostringstream d;
    d << "n=50: eq_4k " << r50.eq_4k << "/200; n=100: eq_log_n " << r100.eq_log_n << "/200";
    res.pass = r50.eq_4k == 200 && r100.eq_log_n >= 198;
    res.detail = d.str();
    return res;
}

// Criterion 8: perturbation identity, both sides from the subset oracle.
inline CriterionResult perturbation_identity(int workers) {
    CriterionResult res{8, "perturbation identity (four-term subset form)", true, ""};
    auto rep = perturbation_identity_check(6, 2.0, 500, 8008, workers);
    std::ostringstream d;
    d << rep.passes << "/500 exact to 1e-9, max diff " << rep.max_abs_diff;
    res.pass = rep.passes == 500;
    res.detail = d.str();
    return res;
}

// Criterion 9: the central limit theorems at desk scale.
inline CriterionResult clt_ladders(int workers, std::ostream& log) {
    CriterionResult res{9, "CLT ladders (KS to normal, variance scaling)", true, ""};
    std::ostringstream d;
    bool ok = true;
    const int reps = 2000;

    auto ladder = [&](Problem p, const std::vector<int>& ns, bool rule, double lambda,
                      std::uint64_t seed) {
        std::vector<double> ks, var_over_n;
        std::size_t idx = 0;
        for (int n : ns) {
            double lam = rule ? 8.0 * std::log(n) : lambda;
            auto records = run_replicates(p, n, lam, reps, derive_seed(seed, idx++), workers);
            std::vector<double> values;
            for (const auto& r : records) values.push_back(r.value);
            auto rep = ks_to_normal(values);
            auto s = summarize(values);
            ks.push_back(rep.ks_distance);
            var_over_n.push_back(s.var / n);
            log << "    " << problem_name(p) << " n=" << n << " lambda=" << lam
                << " ks=" << rep.ks_distance << " var/n=" << s.var / n << "\n";
        }
        return std::pair(ks, var_over_n);
    };

    auto [ks_mwm, var_mwm] =
        ladder(Problem::MaxWeightMatching, {100, 400, 1600}, false, 2.0, 9009);
    auto [ks_dmm, var_dmm] =
        ladder(Problem::DilutedMinMatching, {100, 400, 1600}, false, 2.0, 9010);
    auto [ks_ec, var_ec] = ladder(Problem::DilutedEdgeCover, {50, 100, 200}, true, 0.0, 9011);

    auto nonincreasing = [](const std::vector<double>& xs) {
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] > xs[i - 1]) return false;
        return true;
    };
    if (!nonincreasing(ks_mwm) || ks_mwm.back() >= 0.06) ok = false;
    if (!nonincreasing(ks_dmm) || ks_dmm.back() >= 0.06) ok = false;
    if (ks_ec.back() >= 0.08) ok = false;

    auto var_ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!(x > 0.0)) return false;
        for (std::size_t i = 1; i < v.size(); ++i) {
            double ratio = v[i] / v[i - 1];
            if (ratio < 0.5 || ratio > 2.0) return false;
        }
        return true;
    };
    if (!var_ok(var_mwm) || !var_ok(var_dmm) || !var_ok(var_ec)) ok = false;

    d << "ks mwm [";
    for (double x : ks_mwm) d << " " << std::setprecision(4) << x;
    d << " ] dmm [";
    for (double x : ks_dmm) d << " " << x;
    d << " ] ec [";
    for (double x : ks_ec) d << " " << x;
    d << " ]";
    res.pass = ok;
    res.detail = d.str();
    return res;
}

// Criterion 10: neighborhood diagnostics.
inline CriterionResult neighborhood_diagnostics(int workers) {
    CriterionResult res{10, "tree probability 1/n scaling; coupling TV decreasing", true, ""};
    std::ostringstream d;
    bool ok = true;

    auto t500 = tree_probability(500, 2.0, 2, 5000, 10010, workers);
    auto t1000 = tree_probability(1000, 2.0, 2, 5000, 10011, workers);
    double f500 = 1.0 - t500.p_tree, f1000 = 1.0 - t1000.p_tree;
    double ratio = f1000 / f500;
    double ratio_se = ratio * std::hypot(t500.se / f500, t1000.se / f1000);
    if (!(ratio - 2.0 * ratio_se <= 1.0 && ratio + 2.0 * ratio_se >= 0.25)) ok = false;
    d << "fail(500)=" << std::setprecision(4) << f500 << " fail(1000)=" << f1000 << " ratio="
      << ratio << "+-" << ratio_se;

    std::vector<CouplingTvReport> tv;
    std::size_t idx = 0;
    for (int n : {250, 1000, 4000})
        tv.push_back(coupling_statistic_tv(n, 2.0, 2, 10000, CouplingStatistic::NodeCount,
                                           derive_seed(10012, idx++), workers));
    for (std::size_t i = 1; i < tv.size(); ++i) {
        double allowance = 2.0 * std::hypot(tv[i].bootstrap_se, tv[i - 1].bootstrap_se);
        if (tv[i].tv > tv[i - 1].tv + allowance) ok = false;
    }
    d << "; tv [";
    for (const auto& r : tv) d << " " << r.tv;
    d << " ]";
    res.pass = ok;
    res.detail = d.str();
    return res;
}

} // namespace detail

// Runs criterion 1 only (the oracle-equivalence suite).
inline bool run_oracle_suite(std::ostream& os) {
    auto r = detail::oracle_equivalence();
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " -- " << r.detail << "\n";
    return r.pass;
}

// Runs all ten criteria, printing one line per criterion; returns true iff
// everything passed.
inline bool run_all(std::ostream& os, int workers = 0) {
    if (workers <= 0) workers = default_workers();
    std::vector<CriterionResult> results;
    results.push_back(detail::oracle_equivalence());
    results.push_back(detail::bracket_soundness());
    results.push_back(detail::parity_monotonicity());
    results.push_back(detail::delta_k_decay(workers));
    results.push_back(detail::vlambda_analysis());
    results.push_back(detail::matching_operator_sweep());
    results.push_back(detail::ec_truncation(workers));
    results.push_back(detail::perturbation_identity(workers));
    results.push_back(detail::clt_ladders(workers, os));
    results.push_back(detail::neighborhood_diagnostics(workers));
    bool all = true;
    for (const auto& r : results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " -- " << r.detail
           << "\n";
        all = all && r.pass;
    }
    os << (all ? "acceptance: ALL CRITERIA PASS\n" : "acceptance: FAILURES PRESENT\n");
    return all;
}

} // namespace sparseopt::acceptance
