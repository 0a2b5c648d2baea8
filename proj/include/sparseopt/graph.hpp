#pragma once

// Weighted-graph data model: finite simple graphs with nonnegative edge
// weights on a label space {0..n-1}, where individual labels may be deleted
// (deletion keeps the surviving labels stable). Values are immutable after
// construction and safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sparseopt {

struct WeightedEdge {
    int u = 0;
    int v = 0;
    double w = 0.0;
};

inline bool operator==(const WeightedEdge& a, const WeightedEdge& b) {
    return a.u == b.u && a.v == b.v && a.w == b.w;
}

class WeightedGraph {
public:
    WeightedGraph() = default;

    // Vertices 0..n-1, all active. Edges are normalized to u < v, sorted.
    // Rejects self-loops, out-of-range endpoints, parallel edges and
    // negative weights.
    WeightedGraph(int n, std::vector<WeightedEdge> edges) : n_(n), active_(n, 1) {
        if (n < 0) throw std::invalid_argument("WeightedGraph: n must be >= 0");
        for (auto& e : edges) {
            if (e.u == e.v) throw std::invalid_argument("WeightedGraph: self-loop");
            if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
                throw std::invalid_argument("WeightedGraph: endpoint out of range");
            if (!(e.w >= 0.0)) throw std::invalid_argument("WeightedGraph: negative weight");
            if (e.u > e.v) std::swap(e.u, e.v);
        }
        std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
            return std::pair(a.u, a.v) < std::pair(b.u, b.v);
        });
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (edges[i - 1].u == edges[i].u && edges[i - 1].v == edges[i].v)
                throw std::invalid_argument("WeightedGraph: parallel edge");
        edges_ = std::move(edges);
        build_adjacency();
    }

    // Label-space size (highest label + 1), not the number of live vertices.
    int n() const { return n_; }

    bool is_active(int v) const { return active_[v] != 0; }

    int active_count() const { return active_n_; }

    const std::vector<WeightedEdge>& edges() const { return edges_; }

    int edge_count() const { return static_cast<int>(edges_.size()); }

    struct AdjEntry {
        int to;
        double w;
    };

    // Neighbors of v, sorted by label.
    const AdjEntry* adj_begin(int v) const { return adj_.data() + adj_offset_[v]; }
    const AdjEntry* adj_end(int v) const { return adj_.data() + adj_offset_[v + 1]; }
    int degree(int v) const { return adj_offset_[v + 1] - adj_offset_[v]; }

    std::optional<double> weight(int u, int v) const {
        for (const AdjEntry* it = adj_begin(u); it != adj_end(u); ++it)
            if (it->to == v) return it->w;
        return std::nullopt;
    }

    bool has_edge(int u, int v) const { return weight(u, v).has_value(); }

    // Cheapest incident weight, or nullopt for an isolated vertex.
    std::optional<double> min_incident_weight(int v) const {
        double best = std::numeric_limits<double>::infinity();
        for (const AdjEntry* it = adj_begin(v); it != adj_end(v); ++it)
            best = std::min(best, it->w);
        if (degree(v) == 0) return std::nullopt;
        return best;
    }

    double total_weight() const {
        double s = 0.0;
        for (const auto& e : edges_) s += e.w;
        return s;
    }

    std::vector<int> active_vertices() const {
        std::vector<int> out;
        out.reserve(active_n_);
        for (int v = 0; v < n_; ++v)
            if (active_[v]) out.push_back(v);
        return out;
    }

    friend WeightedGraph delete_vertices(const WeightedGraph&, const std::vector<int>&);

private:
    void build_adjacency() {
        active_n_ = 0;
        for (int v = 0; v < n_; ++v) active_n_ += active_[v] ? 1 : 0;
        adj_offset_.assign(n_ + 1, 0);
        for (const auto& e : edges_) {
            ++adj_offset_[e.u + 1];
            ++adj_offset_[e.v + 1];
        }
        for (int v = 0; v < n_; ++v) adj_offset_[v + 1] += adj_offset_[v];
        adj_.resize(edges_.size() * 2);
        std::vector<int> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
        for (const auto& e : edges_) {
            adj_[cursor[e.u]++] = {e.v, e.w};
            adj_[cursor[e.v]++] = {e.u, e.w};
        }
    }

    int n_ = 0;
    int active_n_ = 0;
    std::vector<WeightedEdge> edges_;
    std::vector<char> active_;
    std::vector<int> adj_offset_{0};
    std::vector<AdjEntry> adj_;
};

// Induced graph on the complement of U. Surviving labels are preserved;
// use compact_labels() for solvers that want a dense 0..m-1 space.
inline WeightedGraph delete_vertices(const WeightedGraph& g, const std::vector<int>& drop) {
    std::vector<char> dead(g.n(), 0);
    for (int v : drop) {
        if (v < 0 || v >= g.n()) throw std::invalid_argument("delete_vertices: label out of range");
        dead[v] = 1;
    }
    std::vector<WeightedEdge> kept;
    kept.reserve(g.edges().size());
    for (const auto& e : g.edges())
        if (!dead[e.u] && !dead[e.v]) kept.push_back(e);
    WeightedGraph out(g.n(), std::move(kept));
    for (int v = 0; v < g.n(); ++v)
        if (dead[v] || !g.is_active(v)) out.active_[v] = 0;
    out.build_adjacency();
    return out;
}

struct CompactGraph {
    WeightedGraph graph;          // dense labels 0..m-1, all active
    std::vector<int> orig_label;  // new label -> original label
};

inline CompactGraph compact_labels(const WeightedGraph& g) {
    std::vector<int> to_new(g.n(), -1);
    std::vector<int> orig;
    orig.reserve(g.active_count());
    for (int v = 0; v < g.n(); ++v) {
        if (g.is_active(v)) {
            to_new[v] = static_cast<int>(orig.size());
            orig.push_back(v);
        }
    }
    std::vector<WeightedEdge> edges;
    edges.reserve(g.edges().size());
    for (const auto& e : g.edges()) edges.push_back({to_new[e.u], to_new[e.v], e.w});
    return {WeightedGraph(static_cast<int>(orig.size()), std::move(edges)), std::move(orig)};
}

// One edge slot of the graph together with an independent resample of its
// (weight, presence) pair; the two pairs come from disjoint streams.
struct EdgeEnv {
    int u = 0;
    int v = 0;
    double w = 0.0;        // primary weight w_e
    bool present = false;  // primary presence bit b_e
    double w_prime = 0.0;
    bool present_prime = false;
};

// Swap the roles of the primary and resample pairs (test helper: the two
// pairs are exchangeable by construction).
inline EdgeEnv swap_env(const EdgeEnv& env) {
    return {env.u, env.v, env.w_prime, env.present_prime, env.w, env.present};
}

// The perturbed graph G^e: identical to g except that edge e carries the
// resample pair (w', b').
inline WeightedGraph resample_edge(const WeightedGraph& g, const EdgeEnv& env) {
    if (env.u < 0 || env.v < 0 || env.u >= g.n() || env.v >= g.n() || env.u == env.v)
        throw std::invalid_argument("resample_edge: invalid edge");
    int a = std::min(env.u, env.v), b = std::max(env.u, env.v);
    std::vector<WeightedEdge> edges;
    edges.reserve(g.edges().size() + 1);
    for (const auto& e : g.edges())
        if (!(e.u == a && e.v == b)) edges.push_back(e);
    if (env.present_prime) edges.push_back({a, b, env.w_prime});
    WeightedGraph out(g.n(), std::move(edges));
    std::vector<int> drop;
    for (int v = 0; v < g.n(); ++v)
        if (!g.is_active(v)) drop.push_back(v);
    return drop.empty() ? out : delete_vertices(out, drop);
}

} // namespace sparseopt
