#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparseopt/clt.hpp"
#include "sparseopt/stats.hpp"

using namespace sparseopt;

TEST_CASE("run_replicates degenerate families") {
    // lambda = 0 for MWM: empty graphs, value 0.
    auto zero = run_replicates(Problem::MaxWeightMatching, 10, 0.0, 5, 1);
    for (const auto& r : zero) CHECK(r.value == 0.0);

    // DMM with tiny lambda: these seeds produce edgeless K_n(lambda), so
    // every value is n*lambda/2.
    auto dmm = run_replicates(Problem::DilutedMinMatching, 4, 1e-6, 10, 2);
    for (const auto& r : dmm) CHECK(r.value == 4 * 1e-6 / 2.0);

    CHECK_THROWS_AS(run_replicates(Problem::MaxWeightMatching, 10, 2.0, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("run_replicates is reproducible and worker-independent") {
    auto a = run_replicates(Problem::DilutedMinMatching, 30, 2.0, 40, 99, 1);
    auto b = run_replicates(Problem::DilutedMinMatching, 30, 2.0, 40, 99, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].value == b[i].value);
    }
}

TEST_CASE("mean value per vertex is consistent across n (beta consistency)") {
    const int reps = 800;
    auto r100 = run_replicates(Problem::MaxWeightMatching, 100, 2.0, reps, 1234, 2);
    auto r200 = run_replicates(Problem::MaxWeightMatching, 200, 2.0, reps, 1235, 2);
    auto stat = [](const std::vector<ReplicateRecord>& rs, int n) {
        std::vector<double> v;
        for (const auto& r : rs) v.push_back(r.value / n);
        return summarize(v);
    };
    auto s100 = stat(r100, 100);
    auto s200 = stat(r200, 200);
    double se = std::hypot(s100.sd / std::sqrt(reps), s200.sd / std::sqrt(reps));
    CHECK(std::abs(s100.mean - s200.mean) < 3.0 * se);
}

TEST_CASE("ks_to_normal on exact quantiles, constants, and a coin flip") {
    // Exact standard normal quantiles at i/(N+1).
    std::vector<double> q;
    const int N = 999;
    for (int i = 1; i <= N; ++i)
        q.push_back(normal_quantile(static_cast<double>(i) / (N + 1)));
    auto rep = ks_to_normal(q);
    CHECK(rep.ks_distance < 0.002);

    std::vector<double> flat(100, 3.25);
    CHECK_THROWS_AS(ks_to_normal(flat), std::invalid_argument);

    std::vector<double> coin;
    for (int i = 0; i < 1000; ++i) coin.push_back(-1.0);
    for (int i = 0; i < 1000; ++i) coin.push_back(1.0);
    CHECK(ks_to_normal(coin).ks_distance > 0.25);

    std::vector<double> tiny(10, 0.0);
    CHECK_THROWS_AS(ks_to_normal(tiny), std::invalid_argument);
}

TEST_CASE("variance profile positivity and degenerate case") {
    auto rows = variance_profile(Problem::MaxWeightMatching, 0.0, {20, 40}, 50, 5, 2);
    for (const auto& r : rows) CHECK(r.var == 0.0);

    auto live = variance_profile(Problem::MaxWeightMatching, 2.0, {50, 100}, 400, 6, 2);
    REQUIRE(live.size() == 2);
    for (const auto& r : live) CHECK(r.var_over_n > 0.0);
    double ratio = live[1].var_over_n / live[0].var_over_n;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("ec truncation identity at small n") {
    auto rep = ec_truncation_check(30, 50, 77, 2);
    CHECK(rep.eq_4k == 50); // deterministic lemma chain
    CHECK(rep.eq_log_n >= 48);
    CHECK(rep.max_diff_4k <= 1e-9);

    // n = 2: single edge, EC = EC_{4K} trivially.
    auto two = ec_truncation_check(2, 20, 78, 1);
    CHECK(two.eq_4k == 20);
}

TEST_CASE("tree probability degenerate cases") {
    auto k0 = tree_probability(100, 2.0, 0, 200, 1, 2);
    CHECK(k0.p_tree == 1.0);
    auto empty = tree_probability(100, 0.0, 3, 200, 2, 2);
    CHECK(empty.p_tree == 1.0);
    auto sparse = tree_probability(300, 2.0, 2, 500, 3, 2);
    CHECK(sparse.p_tree > 0.8);
    CHECK(sparse.p_tree <= 1.0);
    CHECK(sparse.se > 0.0);
}

TEST_CASE("coupling TV basics") {
    auto k0 = coupling_statistic_tv(200, 2.0, 0, 1000, CouplingStatistic::NodeCount, 4, 2, 50);
    CHECK(k0.tv == 0.0);

    // Binomial(n-1, lambda/n) vs Poisson(lambda) root degree at n=2000.
    auto deg = coupling_statistic_tv(2000, 2.0, 1, 5000, CouplingStatistic::RootDegree, 5, 2, 50);
    CHECK(deg.tv < 0.03);
    CHECK(deg.bootstrap_se > 0.0);
    CHECK(deg.bootstrap_se < 0.02);
}

TEST_CASE("perturbation identity harness") {
    auto rep = perturbation_identity_check(6, 2.0, 100, 6, 2);
    CHECK(rep.passes == 100);
    CHECK(rep.max_abs_diff <= 1e-9);
    CHECK_THROWS_AS(perturbation_identity_check(20, 2.0, 10, 1), std::invalid_argument);
}

TEST_CASE("normal quantile and cdf sanity") {
    CHECK_THAT(normal_cdf(0.0), Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(normal_cdf(-1.0), Catch::Matchers::WithinAbs(0.15865525393145707, 1e-12));
    for (double p : {0.001, 0.1, 0.5, 0.77, 0.999})
        CHECK_THAT(normal_cdf(normal_quantile(p)), Catch::Matchers::WithinAbs(p, 1e-12));
}

TEST_CASE("chi-square tail checks against known values") {
    // Q(1 dof, 3.841) ~ 0.05, Q(5 dof, 15.086) ~ 0.01.
    CHECK_THAT(chi_square_pvalue(3.841459, 1.0), Catch::Matchers::WithinAbs(0.05, 1e-4));
    CHECK_THAT(chi_square_pvalue(15.08627, 5.0), Catch::Matchers::WithinAbs(0.01, 1e-4));
}
