#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparseopt/sampling.hpp"
#include "sparseopt/stats.hpp"

using namespace sparseopt;

TEST_CASE("er sampler degenerate probabilities") {
    auto empty = sample_er_graph(5, 0.0, WeightDist::exp1(), 1);
    CHECK(empty.n() == 5);
    CHECK(empty.edge_count() == 0);

    double lambda = 1.5;
    auto full = sample_er_graph(3, 1.0, WeightDist::uniform(lambda), 1);
    CHECK(full.edge_count() == 3);
    for (const auto& e : full.edges()) {
        CHECK(e.w >= 0.0);
        CHECK(e.w <= lambda);
    }

    CHECK_THROWS_AS(sample_er_graph(0, 0.5, WeightDist::exp1(), 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_er_graph(5, 1.5, WeightDist::exp1(), 1), std::invalid_argument);
}

TEST_CASE("er sampler edge count matches the binomial law") {
    const int n = 10000;
    const double p = 2.0 / n;
    auto g = sample_er_graph(n, p, WeightDist::exp1(), 77);
    double pairs = 0.5 * n * (n - 1.0);
    double mean = pairs * p;
    double sd = std::sqrt(pairs * p * (1.0 - p));
    CHECK(std::abs(g.edge_count() - mean) < 4.0 * sd);
}

TEST_CASE("er sampler is deterministic in the seed") {
    auto a = sample_er_graph(200, 0.02, WeightDist::exp1(), 123);
    auto b = sample_er_graph(200, 0.02, WeightDist::exp1(), 123);
    auto c = sample_er_graph(200, 0.02, WeightDist::exp1(), 124);
    CHECK(a.edges() == b.edges());
    CHECK(a.edges() != c.edges());
}

TEST_CASE("kn_lambda forced edge and support") {
    // lambda so large that p = 1 - e^{-lambda/2} rounds to 1.
    auto g = sample_kn_lambda(2, 80.0, 5);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edges()[0].w >= 0.0);
    CHECK(g.edges()[0].w <= 80.0);

    CHECK_THROWS_AS(sample_kn_lambda(5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_kn_lambda(5, -1.0, 1), std::invalid_argument);
}

TEST_CASE("kn_lambda weights pass a KS test against the truncated scaled exp") {
    const int n = 1000;
    const double lambda = 2.0;
    auto dist = WeightDist::trunc_scaled_exp(n, lambda);
    std::vector<double> pooled;
    SplitMix64 seeds(909);
    while (pooled.size() < 10000) {
        auto g = sample_kn_lambda(n, lambda, seeds.next());
        for (const auto& e : g.edges()) {
            pooled.push_back(e.w);
            REQUIRE(e.w >= 0.0);
            REQUIRE(e.w <= lambda);
        }
    }
    double d = ks_distance(pooled, [&](double x) { return dist.cdf(x); });
    // One-sample KS critical value at level 0.01.
    double crit = 1.628 / std::sqrt(static_cast<double>(pooled.size()));
    CHECK(d < crit);
}

TEST_CASE("kn_lambda presence frequency matches 1 - e^{-lambda/n}") {
    const int n = 100;
    const double lambda = 2.0;
    const double p = -std::expm1(-lambda / n);
    const double pairs = 0.5 * n * (n - 1.0);
    long long present = 0;
    SplitMix64 seeds(808);
    const int reps = 500;
    for (int r = 0; r < reps; ++r) present += sample_kn_lambda(n, lambda, seeds.next()).edge_count();
    double freq = static_cast<double>(present) / (reps * pairs);
    double se = std::sqrt(p * (1.0 - p) / (reps * pairs));
    CHECK(std::abs(freq - p) < 4.0 * se);
}

TEST_CASE("weight distribution cdf endpoints") {
    auto tse = WeightDist::trunc_scaled_exp(50, 3.0);
    CHECK(tse.cdf(-1.0) == 0.0);
    CHECK(tse.cdf(0.0) == 0.0);
    CHECK(tse.cdf(3.0) == 1.0);
    CHECK(tse.support_max() == 3.0);
    auto uni = WeightDist::uniform(2.0);
    CHECK(uni.cdf(1.0) == 0.5);
    auto exp1 = WeightDist::exp1();
    CHECK(exp1.cdf(0.0) == 0.0);
    CHECK(std::isinf(exp1.support_max()));
}

TEST_CASE("draw_edge_env reads the primary pair off the graph") {
    auto dist = WeightDist::exp1();
    SplitMix64 rng(606);
    auto g = sample_er_graph(10, 0.5, dist, rng.next());
    for (int v = 1; v < 5; ++v) {
        auto env = draw_edge_env(g, 0, v, 0.5, dist, rng.next());
        CHECK(env.present == g.has_edge(0, v));
        if (env.present) CHECK(env.w == *g.weight(0, v));
    }
}
