#pragma once

// Samplers for sparse Erdos-Renyi graphs and the K_n(lambda) family, plus
// neighborhood extraction and edge environments. Sampling walks the
// linearized pair index with geometric skips, so the cost is proportional to
// the number of edges produced rather than n^2.

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "sparseopt/graph.hpp"
#include "sparseopt/rng.hpp"
#include "sparseopt/sampling_dist.hpp"
#include "sparseopt/tree.hpp"

namespace sparseopt {

namespace detail {

// Decode linear index m in [0, n(n-1)/2) to the pair (u, v), u < v, ordered
// as (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::pair<int, int> decode_pair(std::uint64_t m, int n) {
    auto row_start = [n](std::uint64_t r) {
        return r * static_cast<std::uint64_t>(n) - r - r * (r - 1) / 2;
    };
    // Largest u with row_start(u) <= m, by binary search.
    std::uint64_t lo = 0, hi = static_cast<std::uint64_t>(n) - 1;
    while (lo < hi) {
        std::uint64_t mid = (lo + hi + 1) / 2;
        if (row_start(mid) <= m)
            lo = mid;
        else
            hi = mid - 1;
    }
    int u = static_cast<int>(lo);
    int v = static_cast<int>(m - row_start(lo)) + u + 1;
    return {u, v};
}

} // namespace detail

// Erdos-Renyi G(n, p) with i.i.d. weights from dist. Deterministic in seed;
// presence and weights come from separate derived streams.
inline WeightedGraph sample_er_graph(int n, double p, const WeightDist& dist, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_er_graph: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_er_graph: p must be in [0,1]");
    std::vector<WeightedEdge> edges;
    const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (p > 0.0 && pairs > 0) {
        SplitMix64 presence(derive_seed(seed, StreamTag::EdgePresence));
        SplitMix64 weights(derive_seed(seed, StreamTag::EdgeWeight));
        if (p == 1.0) {
            for (std::uint64_t m = 0; m < pairs; ++m) {
                auto [u, v] = detail::decode_pair(m, n);
                edges.push_back({u, v, dist.sample(weights)});
            }
        } else {
            const double log1mp = std::log1p(-p);
            const double cap = static_cast<double>(pairs);
            auto skip = [&]() {
                double s = std::floor(std::log(presence.next_unit_pos()) / log1mp);
                return static_cast<std::uint64_t>(std::min(s, cap));
            };
            std::uint64_t m = skip();
            while (m < pairs) {
                auto [u, v] = detail::decode_pair(m, n);
                edges.push_back({u, v, dist.sample(weights)});
                m += 1 + skip();
            }
        }
    }
    return WeightedGraph(n, std::move(edges));
}

// K_n(lambda): the sub-lambda part of the complete graph on n vertices with
// i.i.d. n*Exp(1) weights. Equivalent to G(n, 1 - e^{-lambda/n}) with
// TruncScaledExp(n, lambda) weights; every weight lies in [0, lambda].
inline WeightedGraph sample_kn_lambda(int n, double lambda, std::uint64_t seed) {
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_kn_lambda: lambda must be > 0");
    double p = -std::expm1(-lambda / static_cast<double>(n));
    WeightedGraph g = sample_er_graph(n, p, WeightDist::trunc_scaled_exp(n, lambda), seed);
    for (const auto& e : g.edges())
        if (!(e.w >= 0.0 && e.w <= lambda))
            throw std::logic_error("sample_kn_lambda: weight outside [0, lambda]");
    return g;
}

// Complete graph with i.i.d. weights from dist (used for the edge-cover
// experiments on K_n).
inline WeightedGraph sample_complete_graph(int n, const WeightDist& dist, std::uint64_t seed) {
    return sample_er_graph(n, 1.0, dist, seed);
}

struct Neighborhood {
    int root = 0;
    int k = 0;
    WeightedGraph subgraph;
    bool is_tree = false;
    std::optional<RootedTree> as_tree;
};

// B_k(v, g): union of all paths of length <= k starting at v. An edge (x, y)
// belongs to B_k iff min(d(x), d(y)) < k, where d is graph distance from v;
// in particular edges between two depth-k vertices are excluded.
inline Neighborhood neighborhood(const WeightedGraph& g, int v, int k) {
    if (v < 0 || v >= g.n() || !g.is_active(v))
        throw std::invalid_argument("neighborhood: invalid root");
    if (k < 0) throw std::invalid_argument("neighborhood: k must be >= 0");

    std::vector<int> dist(g.n(), -1);
    std::vector<int> order;
    dist[v] = 0;
    order.push_back(v);
    for (std::size_t head = 0; head < order.size(); ++head) {
        int x = order[head];
        if (dist[x] == k) break;
        for (auto it = g.adj_begin(x); it != g.adj_end(x); ++it) {
            if (dist[it->to] < 0) {
                dist[it->to] = dist[x] + 1;
                order.push_back(it->to);
            }
        }
    }

    std::vector<WeightedEdge> edges;
    for (const auto& e : g.edges()) {
        if (dist[e.u] < 0 || dist[e.v] < 0) continue;
        if (std::min(dist[e.u], dist[e.v]) < k) edges.push_back(e);
    }

    Neighborhood nb;
    nb.root = v;
    nb.k = k;
    std::vector<int> drop;
    for (int x = 0; x < g.n(); ++x)
        if (g.is_active(x) && dist[x] < 0) drop.push_back(x);
    nb.subgraph = delete_vertices(WeightedGraph(g.n(), edges), drop);
    nb.is_tree = (static_cast<int>(edges.size()) == static_cast<int>(order.size()) - 1);

    if (nb.is_tree) {
        RootedTree t;
        t.set_root_orig_id(v);
        std::vector<int> node_of(g.n(), -1);
        node_of[v] = 0;
        // `order` is BFS order; attach each vertex to its BFS parent.
        std::vector<char> added(g.n(), 0);
        added[v] = 1;
        for (int x : order) {
            int px = node_of[x];
            for (auto it = nb.subgraph.adj_begin(x); it != nb.subgraph.adj_end(x); ++it) {
                if (added[it->to]) continue;
                added[it->to] = 1;
                node_of[it->to] = t.add_child(px, it->w, it->to);
            }
        }
        nb.as_tree = std::move(t);
    }
    return nb;
}

// Edge environment for e = (u, v): the primary pair is read off the graph,
// the resample pair is drawn fresh from its own streams.
inline EdgeEnv draw_edge_env(const WeightedGraph& g, int u, int v, double p,
                             const WeightDist& dist, std::uint64_t seed) {
    EdgeEnv env;
    env.u = u;
    env.v = v;
    auto w = g.weight(u, v);
    env.present = w.has_value();
    env.w = w.value_or(0.0);
    SplitMix64 presence(derive_seed(seed, StreamTag::EnvPrimary));
    SplitMix64 weight_rng(derive_seed(seed, StreamTag::EnvResample));
    env.present_prime = presence.next_bernoulli(p);
    env.w_prime = dist.sample(weight_rng);
    return env;
}

} // namespace sparseopt
