#pragma once

// Exact optimal values for the four problems: maximum weight matching (MWM),
// lambda-diluted minimum matching (DMM), optimal edge cover (EC) and the
// lambda-diluted edge cover (EC_lambda), plus brute-force oracles used to
// validate the reduction solvers. Matching runs per connected component with
// a linear-time DP on acyclic components and blossoms elsewhere.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparseopt/graph.hpp"
#include "sparseopt/matching.hpp"

namespace sparseopt {

enum class Problem { MaxWeightMatching, DilutedMinMatching, EdgeCover, DilutedEdgeCover };

inline const char* problem_name(Problem p) {
    switch (p) {
        case Problem::MaxWeightMatching: return "mwm";
        case Problem::DilutedMinMatching: return "dmm";
        case Problem::EdgeCover: return "ec";
        case Problem::DilutedEdgeCover: return "ec_lambda";
    }
    return "?";
}

class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class EnumerationCapError : public std::runtime_error {
public:
    explicit EnumerationCapError(const std::string& what) : std::runtime_error(what) {}
};

struct Solution {
    Problem problem;
    double value = 0.0;
    std::vector<std::pair<int, int>> chosen_edges;
    std::optional<double> lambda;

    // Value recomputed from the certificate: edge weights plus the diluted
    // penalties implied by the problem. Used by consistency checks.
    double certificate_value(const WeightedGraph& g) const {
        double w_sum = 0.0;
        std::vector<char> covered(g.n(), 0);
        for (auto [u, v] : chosen_edges) {
            auto w = g.weight(u, v);
            if (!w) throw std::logic_error("certificate edge not in graph");
            w_sum += *w;
            covered[u] = covered[v] = 1;
        }
        int untouched = 0;
        for (int v = 0; v < g.n(); ++v)
            if (g.is_active(v) && !covered[v]) ++untouched;
        switch (problem) {
            case Problem::MaxWeightMatching:
            case Problem::EdgeCover:
                return w_sum;
            case Problem::DilutedMinMatching:
            case Problem::DilutedEdgeCover:
                return w_sum + (*lambda / 2.0) * untouched;
        }
        return w_sum;
    }
};

namespace detail {

// Maximum weight matching on an acyclic component, by tree DP.
// Vertices are local ids 0..nv-1; adj holds (neighbor, weight).
struct TreeMwm {
    const std::vector<std::vector<std::pair<int, double>>>& adj;
    std::vector<double> best;       // optimum in subtree
    std::vector<double> free_val;   // optimum in subtree with root unmatched
    std::vector<int> pick;          // child matched to node in `best`, or -1
    std::vector<int> order, parent;

    explicit TreeMwm(const std::vector<std::vector<std::pair<int, double>>>& a)
        : adj(a),
          best(a.size(), 0.0),
          free_val(a.size(), 0.0),
          pick(a.size(), -1),
          parent(a.size(), -2) {}

    void run(int root, std::vector<std::pair<int, int>>& matched_out) {
        order.clear();
        order.push_back(root);
        parent[root] = -1;
        for (std::size_t h = 0; h < order.size(); ++h) {
            int v = order[h];
            for (auto [u, w] : adj[v])
                if (u != parent[v]) {
                    parent[u] = v;
                    order.push_back(u);
                }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            double sum_best = 0.0;
            for (auto [u, w] : adj[v])
                if (u != parent[v]) sum_best += best[u];
            free_val[v] = sum_best;
            best[v] = sum_best;
            pick[v] = -1;
            for (auto [u, w] : adj[v]) {
                if (u == parent[v]) continue;
                double cand = sum_best - best[u] + free_val[u] + w;
                if (cand > best[v]) {
                    best[v] = cand;
                    pick[v] = u;
                }
            }
        }
        // Recover one optimal certificate, walking down in BFS order.
        std::vector<char> must_be_free(adj.size(), 0);
        for (int v : order) {
            int take = must_be_free[v] ? -1 : pick[v];
            if (take >= 0) {
                matched_out.push_back({v, take});
                must_be_free[take] = 1;
            }
        }
    }
};

struct MwmResult {
    double value = 0.0;
    std::vector<std::pair<int, int>> edges;
};

// Max weight matching on a compact graph (all vertices 0..n-1 active).
inline MwmResult mwm_compact(int n, const std::vector<WeightedEdge>& edges) {
    MwmResult out;
    if (n == 0 || edges.empty()) return out;

    // Connected components.
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& e : edges) {
        adj[e.u].push_back({e.v, e.w});
        adj[e.v].push_back({e.u, e.w});
    }
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = ncomp;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [u, w] : adj[v])
                if (comp[u] < 0) {
                    comp[u] = ncomp;
                    stack.push_back(u);
                }
        }
        ++ncomp;
    }
    std::vector<std::vector<int>> comp_vertices(ncomp);
    for (int v = 0; v < n; ++v) comp_vertices[comp[v]].push_back(v);
    std::vector<std::vector<WeightedEdge>> comp_edges(ncomp);
    for (const auto& e : edges) comp_edges[comp[e.u]].push_back(e);

    for (int c = 0; c < ncomp; ++c) {
        const auto& verts = comp_vertices[c];
        const auto& es = comp_edges[c];
        if (es.empty()) continue;
        std::vector<int> local(n, -1);
        for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
        const int nv = static_cast<int>(verts.size());

        if (static_cast<int>(es.size()) == nv - 1) {
            // Acyclic: tree DP.
            std::vector<std::vector<std::pair<int, double>>> ladj(nv);
            for (const auto& e : es) {
                ladj[local[e.u]].push_back({local[e.v], e.w});
                ladj[local[e.v]].push_back({local[e.u], e.w});
            }
            TreeMwm dp(ladj);
            std::vector<std::pair<int, int>> matched;
            dp.run(0, matched);
            for (auto [a, b] : matched) out.edges.push_back({verts[a], verts[b]});
        } else {
            std::vector<MaxWeightMatcher::Edge> les;
            les.reserve(es.size());
            for (const auto& e : es) les.push_back({local[e.u], local[e.v], e.w});
            MaxWeightMatcher matcher(nv, std::move(les));
            const auto& mate = matcher.solve();
            for (int v = 0; v < nv; ++v) {
                if (mate[v] > v) {
                    out.edges.push_back({verts[v], verts[mate[v]]});
                }
            }
        }
    }
    // Component values accumulate through the certificate for blossom parts;
    // recompute the total from the certificate to keep one code path.
    double total = 0.0;
    std::vector<std::vector<std::pair<int, double>>> wadj(n);
    for (const auto& e : edges) {
        wadj[e.u].push_back({e.v, e.w});
        wadj[e.v].push_back({e.u, e.w});
    }
    for (auto [u, v] : out.edges) {
        for (auto [x, w] : wadj[u])
            if (x == v) {
                total += w;
                break;
            }
    }
    out.value = total;
    return out;
}

} // namespace detail

// Globally optimal maximum weight matching; certificate edges returned in the
// graph's labels.
inline Solution max_weight_matching(const WeightedGraph& g) {
    auto [cg, orig] = compact_labels(g);
    auto res = detail::mwm_compact(cg.n(), cg.edges());
    Solution s;
    s.problem = Problem::MaxWeightMatching;
    s.value = res.value;
    for (auto [u, v] : res.edges) s.chosen_edges.push_back({orig[u], orig[v]});
    return s;
}

// Minimal lambda-diluted matching cost: sum of matched weights plus
// (lambda/2) per unmatched vertex. Reduction: value = (lambda/2) n - M',
// where M' is the max weight matching under weights (lambda - w)^+ on edges
// with w < lambda.
inline Solution diluted_min_matching(const WeightedGraph& g, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("diluted_min_matching: lambda must be > 0");
    auto [cg, orig] = compact_labels(g);
    std::vector<WeightedEdge> transformed;
    for (const auto& e : cg.edges())
        if (e.w < lambda) transformed.push_back({e.u, e.v, lambda - e.w});
    auto res = detail::mwm_compact(cg.n(), transformed);
    Solution s;
    s.problem = Problem::DilutedMinMatching;
    s.lambda = lambda;
    s.value = (lambda / 2.0) * cg.n() - res.value;
    for (auto [u, v] : res.edges) s.chosen_edges.push_back({orig[u], orig[v]});
    return s;
}

namespace detail {

inline Solution cover_by_reduction(const WeightedGraph& g, std::optional<double> lambda) {
    auto [cg, orig] = compact_labels(g);
    const int n = cg.n();
    const double half = lambda ? *lambda / 2.0 : std::numeric_limits<double>::infinity();

    // mu_v: cheapest way to take care of v alone (cheapest incident edge,
    // capped by the lambda/2 penalty in the diluted problem).
    std::vector<double> mu(n);
    std::vector<int> cheapest(n, -1);
    for (int v = 0; v < n; ++v) {
        double best = std::numeric_limits<double>::infinity();
        for (auto it = cg.adj_begin(v); it != cg.adj_end(v); ++it) {
            if (it->w < best) {
                best = it->w;
                cheapest[v] = it->to;
            }
        }
        if (!lambda && cheapest[v] == -1)
            throw InfeasibleError("edge_cover: isolated vertex " + std::to_string(orig[v]));
        mu[v] = std::min(best, half);
    }

    // Matching on positive gains mu_u + mu_v - w.
    std::vector<WeightedEdge> gains;
    for (const auto& e : cg.edges()) {
        double gamma = mu[e.u] + mu[e.v] - e.w;
        if (gamma > 0.0) gains.push_back({e.u, e.v, gamma});
    }
    auto res = mwm_compact(n, gains);

    Solution s;
    s.problem = lambda ? Problem::DilutedEdgeCover : Problem::EdgeCover;
    s.lambda = lambda;
    double mu_sum = 0.0;
    for (int v = 0; v < n; ++v) mu_sum += mu[v];
    s.value = mu_sum - res.value;

    // Certificate: matched edges plus the cheapest edge of every vertex left
    // unmatched (unless its penalty is the cheaper option).
    std::vector<char> matched(n, 0);
    std::vector<std::pair<int, int>> chosen;
    for (auto [u, v] : res.edges) {
        matched[u] = matched[v] = 1;
        chosen.push_back({u, v});
    }
    for (int v = 0; v < n; ++v) {
        if (matched[v] || cheapest[v] == -1) continue;
        double w = *cg.weight(v, cheapest[v]);
        if (w <= half) chosen.push_back({std::min(v, cheapest[v]), std::max(v, cheapest[v])});
    }
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    for (auto [u, v] : chosen) s.chosen_edges.push_back({orig[u], orig[v]});
    return s;
}

} // namespace detail

// Minimum weight edge cover; requires every active vertex to have an
// incident edge.
inline Solution edge_cover(const WeightedGraph& g) {
    return detail::cover_by_reduction(g, std::nullopt);
}

// Minimum lambda-diluted edge cover cost: edge weights plus (lambda/2) per
// uncovered vertex; always feasible.
inline Solution diluted_edge_cover(const WeightedGraph& g, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("diluted_edge_cover: lambda must be > 0");
    return detail::cover_by_reduction(g, lambda);
}

namespace detail {

// Gray-code walk over all subsets of `items`; flip(i, sign) is called when
// item i enters (+1) or leaves (-1); visit() after each step and for the
// empty set.
template <typename Flip, typename Visit>
void for_each_subset(std::size_t m, Flip&& flip, Visit&& visit) {
    visit();
    std::uint64_t count = std::uint64_t{1} << m;
    std::uint64_t gray = 0;
    for (std::uint64_t i = 1; i < count; ++i) {
        std::uint64_t next = i ^ (i >> 1);
        std::uint64_t diff = gray ^ next;
        int bit = std::countr_zero(diff);
        flip(bit, (next >> bit) & 1 ? +1 : -1);
        gray = next;
        visit();
    }
}

} // namespace detail

inline constexpr int kCoverEnumCap = 24;
inline constexpr int kMatchingDpCap = 20;

// EC_lambda(g, S): cheapest edge collection where only vertices of S are
// charged the lambda/2 penalty when uncovered; edges touching V - S are
// allowed. Exhaustive enumeration; intended for small instances.
inline double diluted_edge_cover_subset(const WeightedGraph& g, double lambda,
                                        const std::vector<int>& S) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("diluted_edge_cover_subset: lambda must be > 0");
    std::vector<char> in_s(g.n(), 0);
    for (int v : S) {
        if (v < 0 || v >= g.n() || !g.is_active(v))
            throw std::invalid_argument("diluted_edge_cover_subset: S not a subset of V");
        in_s[v] = 1;
    }
    // Edges that cannot appear in an optimum: both endpoints outside S, or
    // weight exceeding the total penalty the edge could ever save.
    std::vector<WeightedEdge> items;
    for (const auto& e : g.edges()) {
        if (!in_s[e.u] && !in_s[e.v]) continue;
        if (e.w > lambda) continue;
        items.push_back(e);
    }
    if (static_cast<int>(items.size()) > kCoverEnumCap)
        throw EnumerationCapError("diluted_edge_cover_subset: " + std::to_string(items.size()) +
                                  " edges exceeds enumeration cap " +
                                  std::to_string(kCoverEnumCap));

    std::vector<int> cover_count(g.n(), 0);
    int uncovered = static_cast<int>(S.size());
    double weight_sum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    auto bump = [&](int v, int delta) {
        if (!in_s[v]) return;
        int before = cover_count[v];
        cover_count[v] += delta;
        if (before == 0 && cover_count[v] == 1) --uncovered;
        if (before == 1 && cover_count[v] == 0) ++uncovered;
    };
    detail::for_each_subset(
        items.size(),
        [&](int bit, int sign) {
            weight_sum += sign * items[bit].w;
            bump(items[bit].u, sign);
            bump(items[bit].v, sign);
        },
        [&]() { best = std::min(best, weight_sum + (lambda / 2.0) * uncovered); });
    return best;
}

// Provably optimal values by exhaustive search; the oracle side of every
// reduction-equivalence test.
inline double brute_force(Problem problem, const WeightedGraph& g,
                          std::optional<double> lambda = std::nullopt) {
    auto [cg, orig] = compact_labels(g);
    const int n = cg.n();

    if (problem == Problem::MaxWeightMatching || problem == Problem::DilutedMinMatching) {
        if (n > kMatchingDpCap)
            throw EnumerationCapError("brute_force: n exceeds matching DP cap");
        if (problem == Problem::DilutedMinMatching && !(lambda && *lambda > 0.0))
            throw std::invalid_argument("brute_force: DMM needs lambda > 0");
        const bool diluted = problem == Problem::DilutedMinMatching;
        const double half = diluted ? *lambda / 2.0 : 0.0;
        const std::uint32_t full = n ? (std::uint32_t{1} << n) - 1 : 0;
        // dp over vertex subsets; for MWM maximize weight, for DMM minimize
        // weight plus penalties.
        std::vector<double> dp(full + 1, 0.0);
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            // The lowest vertex of the subset either stays unmatched or pairs
            // with one of its neighbors inside the subset (all of which sit
            // above it, since it is the lowest bit).
            int v = std::countr_zero(mask);
            double val = dp[mask & (mask - 1)] + half;
            for (auto it = cg.adj_begin(v); it != cg.adj_end(v); ++it) {
                if (!((mask >> it->to) & 1)) continue;
                double cand = it->w + dp[mask & ~(std::uint32_t{1} << v) &
                                         ~(std::uint32_t{1} << it->to)];
                val = diluted ? std::min(val, cand) : std::max(val, cand);
            }
            dp[mask] = val;
        }
        return n ? dp[full] : 0.0;
    }

    // Cover problems: enumerate edge subsets.
    if (problem == Problem::DilutedEdgeCover) {
        if (!(lambda && *lambda > 0.0))
            throw std::invalid_argument("brute_force: EC_lambda needs lambda > 0");
        std::vector<int> all;
        for (int v = 0; v < n; ++v) all.push_back(v);
        return diluted_edge_cover_subset(cg, *lambda, all);
    }

    // Plain EC: minimum over covering subsets only.
    if (static_cast<int>(cg.edges().size()) > kCoverEnumCap)
        throw EnumerationCapError("brute_force: edge count exceeds enumeration cap");
    const auto& items = cg.edges();
    std::vector<int> cover_count(n, 0);
    int uncovered = n;
    double weight_sum = 0.0;
    double best = std::numeric_limits<double>::infinity();
    auto bump = [&](int v, int delta) {
        int before = cover_count[v];
        cover_count[v] += delta;
        if (before == 0 && cover_count[v] == 1) --uncovered;
        if (before == 1 && cover_count[v] == 0) ++uncovered;
    };
    detail::for_each_subset(
        items.size(),
        [&](int bit, int sign) {
            weight_sum += sign * items[bit].w;
            bump(items[bit].u, sign);
            bump(items[bit].v, sign);
        },
        [&]() {
            if (uncovered == 0) best = std::min(best, weight_sum);
        });
    if (!std::isfinite(best)) throw InfeasibleError("brute_force: no edge cover exists");
    return best;
}

} // namespace sparseopt
