#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparseopt/cavity.hpp"
#include "sparseopt/exact.hpp"
#include "sparseopt/sampling.hpp"
#include "support/instances.hpp"

using namespace sparseopt;
using testsupport::make_graph;

namespace {
constexpr double kTol = 1e-9;

RootedTree star_tree(const std::vector<double>& weights) {
    RootedTree t;
    for (double w : weights) t.add_child(0, w);
    return t;
}
} // namespace

TEST_CASE("mwm_cavity basic values") {
    RootedTree single;
    CHECK(mwm_cavity(single) == 0.0);

    auto star = star_tree({1.5, 4.0, 2.5});
    CHECK(mwm_cavity(star) == 4.0);

    // Depth-2 path: h = max(0, w1 - max(0, w2)).
    for (auto [w1, w2] : {std::pair{3.0, 1.0}, {1.0, 3.0}, {2.0, 2.5}}) {
        RootedTree path;
        int mid = path.add_child(0, w1);
        path.add_child(mid, w2);
        double expect = std::max(0.0, w1 - std::max(0.0, w2));
        CHECK_THAT(mwm_cavity(path), Catch::Matchers::WithinAbs(expect, 1e-15));

        // Cross-check against M(T) - M(T - root) on the same tree as a graph.
        auto g = make_graph(3, {{0, 1, w1}, {1, 2, w2}});
        double h = max_weight_matching(g).value -
                   max_weight_matching(delete_vertices(g, {0})).value;
        CHECK_THAT(mwm_cavity(path), Catch::Matchers::WithinAbs(h, kTol));
    }
}

TEST_CASE("mwm cavity range bound") {
    SplitMix64 rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        auto t = sample_gw_tree(4, 2.0, WeightDist::exp1(), rng.next());
        double h = mwm_cavity(t);
        double maxw = 0.0;
        for (int c = t.child_begin(0); c < t.child_end(0); ++c)
            maxw = std::max(maxw, t.parent_weight(c));
        CHECK(h >= 0.0);
        CHECK(h <= maxw);
    }
}

TEST_CASE("mwm parity monotonicity on nested truncations") {
    SplitMix64 rng(22);
    for (int rep = 0; rep < 300; ++rep) {
        auto t = sample_gw_tree(7, 2.0, WeightDist::exp1(), rng.next());
        double h[8];
        for (int j = 0; j <= 7; ++j) h[j] = mwm_cavity(t.truncate_to_depth(j));
        for (int r = 0; r <= 3; ++r) CHECK(h[2 * r] <= h[2 * r + 1]);
        for (int r = 1; r <= 3; ++r) {
            CHECK(h[2 * r + 1] <= h[2 * r - 1]); // odd values non-increasing
            CHECK(h[2 * r] >= h[2 * r - 2]);     // even values non-decreasing
        }
    }
}

TEST_CASE("mwm_bracket at k=1 and nested-k narrowing") {
    SplitMix64 rng(33);
    auto g = sample_er_graph(30, 2.0 / 30, WeightDist::exp1(), rng.next());
    auto nb1 = neighborhood(g, 0, 1);
    REQUIRE(nb1.is_tree);
    auto br1 = mwm_bracket(nb1);
    CHECK(br1.lower == 0.0);
    double star_val = 0.0;
    for (auto it = g.adj_begin(0); it != g.adj_end(0); ++it)
        star_val = std::max(star_val, it->w);
    CHECK_THAT(br1.upper, Catch::Matchers::WithinAbs(star_val, 1e-15));

    int checked = 0;
    for (int rep = 0; rep < 400 && checked < 200; ++rep) {
        auto gg = sample_er_graph(40, 2.0 / 40, WeightDist::exp1(), rng.next());
        auto nb2 = neighborhood(gg, 0, 2);
        auto nb3 = neighborhood(gg, 0, 3);
        if (!nb3.is_tree || !nb2.is_tree) continue;
        auto b2 = mwm_bracket(nb2);
        auto b3 = mwm_bracket(nb3);
        CHECK(b3.lower >= b2.lower);
        CHECK(b3.upper <= b2.upper);
        ++checked;
    }
    REQUIRE(checked >= 100);
}

TEST_CASE("mwm bracket soundness against the exact solver") {
    SplitMix64 rng(44);
    for (int k : {1, 2, 3}) {
        int checked = 0;
        for (int rep = 0; checked < 350 && rep < 2000; ++rep) {
            auto g = sample_er_graph(40, 2.0 / 40, WeightDist::exp1(), rng.next());
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = mwm_bracket(nb);
            double h = max_weight_matching(g).value -
                       max_weight_matching(delete_vertices(g, {0})).value;
            INFO("k=" << k << " rep=" << rep);
            REQUIRE(h >= br.lower - kTol);
            REQUIRE(h <= br.upper + kTol);
            ++checked;
        }
        REQUIRE(checked == 350);
    }
}

TEST_CASE("dmm bracket basics") {
    double lambda = 2.0;
    RootedTree single;
    auto br = dmm_cavity_bracket(single, 0, lambda);
    CHECK(br.lower == -1.0);
    CHECK(br.upper == 1.0);

    // Depth < k leaf is exact: an exposed vertex is its own penalty.
    auto br1 = dmm_cavity_bracket(single, 1, lambda);
    CHECK(br1.lower == 1.0);
    CHECK(br1.upper == 1.0);

    // Exact h_lambda for a single vertex equals lambda/2, inside the bracket.
    auto g1 = make_graph(1, {});
    double h = diluted_min_matching(g1, lambda).value; // M_lambda(G - v) = 0
    CHECK_THAT(h, Catch::Matchers::WithinAbs(lambda / 2.0, 1e-15));

    // Star with one leaf of weight w: compare with the exact solver.
    for (double w : {0.3, 1.2, 1.9}) {
        auto star = star_tree({w});
        auto g = make_graph(2, {{0, 1, w}});
        double exact = diluted_min_matching(g, lambda).value -
                       diluted_min_matching(delete_vertices(g, {0}), lambda).value;
        for (int k : {1, 2}) {
            auto b = dmm_cavity_bracket(star, k, lambda);
            INFO("w=" << w << " k=" << k);
            CHECK(exact >= b.lower - kTol);
            CHECK(exact <= b.upper + kTol);
        }
    }
}

TEST_CASE("dmm bracket soundness against the exact solver") {
    double lambda = 2.0;
    SplitMix64 rng(55);
    for (int k : {2, 3}) {
        int checked = 0;
        for (int rep = 0; checked < 350 && rep < 2000; ++rep) {
            auto g = sample_kn_lambda(40, lambda, rng.next());
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = dmm_cavity_bracket(*nb.as_tree, k, lambda);
            CHECK(br.lower <= br.upper);
            double h = diluted_min_matching(g, lambda).value -
                       diluted_min_matching(delete_vertices(g, {0}), lambda).value;
            INFO("k=" << k << " rep=" << rep);
            REQUIRE(h >= br.lower - kTol);
            REQUIRE(h <= br.upper + kTol);
            CHECK(br.lower >= -lambda / 2.0 - kTol);
            CHECK(br.upper <= lambda / 2.0 + kTol);
            ++checked;
        }
        REQUIRE(checked == 350);
    }
}

TEST_CASE("ec cavity boundary conditions and star formulas") {
    double lambda = 3.0;
    RootedTree single;
    auto br = ec_cavity_bracket(single, 0, lambda);
    CHECK(br.lower == 0.0);
    CHECK(br.upper == lambda / 2.0);

    SplitMix64 rng(66);
    for (int rep = 0; rep < 50; ++rep) {
        int d = 1 + static_cast<int>(rng.next() % 5);
        std::vector<double> ws;
        for (int i = 0; i < d; ++i) ws.push_back(3.0 * rng.next_unit());
        auto star = star_tree(ws);
        auto b = ec_cavity_bracket(star, 1, lambda);
        double minw = *std::min_element(ws.begin(), ws.end());
        double expect_upper = std::min(lambda / 2.0, minw);
        double expect_lower = std::max(0.0, std::min(lambda / 2.0, minw - lambda / 2.0));
        CHECK_THAT(b.upper, Catch::Matchers::WithinAbs(expect_upper, 1e-15));
        CHECK_THAT(b.lower, Catch::Matchers::WithinAbs(expect_lower, 1e-15));
    }
}

TEST_CASE("ec bracket soundness against the subset oracle") {
    double lambda = 2.0;
    SplitMix64 rng(77);
    for (int k : {2, 3}) {
        int checked = 0;
        for (int rep = 0; checked < 250 && rep < 4000; ++rep) {
            auto g = sample_kn_lambda(9, lambda, rng.next());
            if (g.edge_count() > 16) continue; // keep the oracle cheap
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) continue;
            auto br = ec_cavity_bracket(*nb.as_tree, k, lambda);
            CHECK(br.lower <= br.upper + kTol);
            CHECK(br.lower >= -kTol);
            CHECK(br.upper <= lambda / 2.0 + kTol);
            std::vector<int> all, rest;
            for (int v = 0; v < g.n(); ++v) all.push_back(v);
            for (int v = 1; v < g.n(); ++v) rest.push_back(v);
            double h = diluted_edge_cover_subset(g, lambda, all) -
                       diluted_edge_cover_subset(g, lambda, rest);
            INFO("k=" << k << " rep=" << rep);
            REQUIRE(h >= br.lower - kTol);
            REQUIRE(h <= br.upper + kTol);
            ++checked;
        }
        REQUIRE(checked == 250);
    }
}

TEST_CASE("ec values stay in [0, lambda/2]") {
    SplitMix64 rng(88);
    for (int rep = 0; rep < 200; ++rep) {
        double lambda = 0.5 + 4.0 * rng.next_unit();
        int k = 1 + static_cast<int>(rng.next() % 4);
        auto t = sample_gw_tree(k, 2.0, WeightDist::uniform(lambda), rng.next());
        auto vals = ec_cavity_values(t, k, lambda);
        for (int i = 0; i < t.size(); ++i) {
            CHECK(vals.lower[i] >= 0.0);
            CHECK(vals.lower[i] <= lambda / 2.0);
            CHECK(vals.upper[i] >= 0.0);
            CHECK(vals.upper[i] <= lambda / 2.0);
        }
    }
}

TEST_CASE("ec_local_approx: unperturbed edge straddles zero") {
    double lambda = 2.0;
    SplitMix64 rng(99);
    int checked = 0;
    for (int rep = 0; checked < 50 && rep < 500; ++rep) {
        auto g = sample_kn_lambda(12, lambda, rng.next());
        if (g.has_edge(0, 1)) continue;
        auto nb = neighborhood(g, 0, 2);
        if (!nb.is_tree) continue;
        EdgeEnv env;
        env.u = 0;
        env.v = 1;
        env.present = false;
        env.present_prime = false;
        auto la = ec_local_approx(nb, nb, env, lambda);
        CHECK(la.la_lower <= 0.0 + kTol);
        CHECK(la.la_upper >= 0.0 - kTol);
        CHECK(la.la_lower <= la.la_upper);
        ++checked;
    }
    REQUIRE(checked == 50);
}

TEST_CASE("ec_local_approx brackets the true perturbation difference") {
    double lambda = 2.0;
    const int n = 10;
    double p = -std::expm1(-lambda / n);
    auto dist = WeightDist::trunc_scaled_exp(n, lambda);
    SplitMix64 rng(111);
    int checked = 0;
    for (int rep = 0; checked < 300 && rep < 6000; ++rep) {
        auto g = sample_kn_lambda(n, lambda, rng.next());
        auto env = draw_edge_env(g, 0, 1, p, dist, rng.next());
        auto ge = resample_edge(g, env);
        auto nb = neighborhood(g, 0, 2);
        auto nbp = neighborhood(ge, 0, 2);
        if (!nb.is_tree || !nbp.is_tree) continue;
        auto la = ec_local_approx(nb, nbp, env, lambda);
        CHECK(la.la_lower <= la.la_upper + kTol);
        double delta = diluted_edge_cover(g, lambda).value - diluted_edge_cover(ge, lambda).value;
        INFO("rep=" << rep << " b=" << env.present << " b'=" << env.present_prime);
        REQUIRE(delta >= la.la_lower - kTol);
        REQUIRE(delta <= la.la_upper + kTol);
        ++checked;
    }
    REQUIRE(checked == 300);
}

TEST_CASE("perturbation identity: four-term subset decomposition") {
    double lambda = 2.0;
    const int n = 6;
    double p = -std::expm1(-lambda / n);
    auto dist = WeightDist::trunc_scaled_exp(n, lambda);
    SplitMix64 rng(222);
    for (int rep = 0; rep < 200; ++rep) {
        auto g = sample_kn_lambda(n, lambda, rng.next());
        auto env = draw_edge_env(g, 0, 1, p, dist, rng.next());
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
        INFO("rep=" << rep);
        REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, kTol));
    }
}

TEST_CASE("estimate_delta_k ranges and decay smoke") {
    auto uni = WeightDist::uniform(2.0);
    auto ec1 = estimate_delta_k(Problem::DilutedEdgeCover, 1, 2.0, uni, 2000, 12345, 2);
    CHECK(ec1.mean_sq >= 0.0);
    // The four-term gap is at most 2*lambda (two root gaps of lambda/2 plus
    // twice the depth-1 gap), so the squared estimate is capped by (2*lambda)^2.
    CHECK(ec1.mean_sq <= 16.0 + kTol);
    auto ec3 = estimate_delta_k(Problem::DilutedEdgeCover, 3, 2.0, uni, 2000, 12345, 2);
    CHECK(ec3.mean_sq <= ec1.mean_sq + 2.0 * std::hypot(ec1.std_err, ec3.std_err));

    auto exp1 = WeightDist::exp1();
    auto m1 = estimate_delta_k(Problem::MaxWeightMatching, 1, 2.0, exp1, 2000, 999, 2);
    auto m2 = estimate_delta_k(Problem::MaxWeightMatching, 2, 2.0, exp1, 2000, 999, 2);
    CHECK(m2.mean_sq <= m1.mean_sq + 2.0 * std::hypot(m1.std_err, m2.std_err));
    CHECK(m1.n_samples == 2000);
}

TEST_CASE("delta_k estimates are deterministic and worker-independent") {
    auto uni = WeightDist::uniform(2.0);
    auto a = estimate_delta_k(Problem::DilutedEdgeCover, 2, 2.0, uni, 500, 777, 1);
    auto b = estimate_delta_k(Problem::DilutedEdgeCover, 2, 2.0, uni, 500, 777, 4);
    CHECK(a.mean_sq == b.mean_sq);
    CHECK(a.std_err == b.std_err);
}

TEST_CASE("diagnostic_bounds formulas") {
    // rho saturates at 1 for small n.
    auto d = diagnostic_bounds(2.0, 2.0, 3, 1e3, 0.0, 1.0);
    CHECK(d.rho_k == 1.0);

    // epsilon vanishes as n grows (lambda_n = lambda, d_tv = 0, fixed k).
    auto d2 = diagnostic_bounds(2.0, 2.0, 2, 1e12, 0.0, 1.0);
    CHECK(d2.epsilon_k < 1e-2);

    // rho decreasing in n, below 1 for huge n.
    auto d3 = diagnostic_bounds(2.0, 2.0, 3, 1e9, 0.0, 1.0);
    auto d4 = diagnostic_bounds(2.0, 2.0, 3, 1e12, 0.0, 1.0);
    CHECK(d3.rho_k < 1.0);
    CHECK(d4.rho_k < d3.rho_k);
}
