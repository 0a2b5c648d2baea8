#pragma once

// Rooted weighted trees in a flat breadth-first arena, plus samplers for
// Poisson Galton-Watson trees and their tilted variant (root gets one extra
// independent subtree through a bridge edge). The BFS node order means every
// cavity recursion is a single reverse pass over the arena.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparseopt/rng.hpp"
#include "sparseopt/sampling_dist.hpp"

namespace sparseopt {

class TreeSizeError : public std::runtime_error {
public:
    explicit TreeSizeError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::size_t kDefaultTreeNodeCap = 10'000'000;

class RootedTree {
public:
    // Single-node tree (the root).
    RootedTree() { add_root(); }

    int size() const { return static_cast<int>(parent_.size()); }
    int parent(int i) const { return parent_[i]; }
    int depth(int i) const { return depth_[i]; }
    double parent_weight(int i) const { return parent_weight_[i]; }
    int depth() const { return size() ? depth_.back() : 0; }

    // Original vertex label when the tree came from a graph neighborhood,
    // -1 otherwise.
    int orig_id(int i) const { return orig_id_[i]; }

    int child_begin(int i) const { return child_begin_[i]; }
    int child_end(int i) const { return child_end_[i]; }
    int child_count(int i) const { return child_end_[i] - child_begin_[i]; }

    // Nodes must be appended in BFS order: all children of node p are added
    // consecutively, and parents come before children.
    int add_child(int p, double edge_weight, int orig = -1) {
        int id = static_cast<int>(parent_.size());
        if (p < 0 || p >= id) throw std::invalid_argument("add_child: bad parent");
        if (child_end_[p] != id && child_count(p) != 0)
            throw std::invalid_argument("add_child: children must be contiguous");
        if (child_count(p) == 0) child_begin_[p] = id;
        child_end_[p] = id + 1;
        parent_.push_back(p);
        depth_.push_back(depth_[p] + 1);
        parent_weight_.push_back(edge_weight);
        orig_id_.push_back(orig);
        child_begin_.push_back(id + 1);
        child_end_.push_back(id + 1);
        return id;
    }

    void set_root_orig_id(int orig) { orig_id_[0] = orig; }

    // Subtree of nodes with depth <= j. BFS order sorts by depth, so this is
    // an arena prefix; node identities (indices) are preserved.
    RootedTree truncate_to_depth(int j) const {
        if (j < 0) throw std::invalid_argument("truncate_to_depth: j must be >= 0");
        RootedTree out;
        int keep = 0;
        while (keep < size() && depth_[keep] <= j) ++keep;
        out.parent_.assign(parent_.begin(), parent_.begin() + keep);
        out.depth_.assign(depth_.begin(), depth_.begin() + keep);
        out.parent_weight_.assign(parent_weight_.begin(), parent_weight_.begin() + keep);
        out.orig_id_.assign(orig_id_.begin(), orig_id_.begin() + keep);
        out.child_begin_.assign(child_begin_.begin(), child_begin_.begin() + keep);
        out.child_end_.assign(child_end_.begin(), child_end_.begin() + keep);
        for (int i = 0; i < keep; ++i) {
            if (out.child_begin_[i] > keep) out.child_begin_[i] = keep;
            if (out.child_end_[i] > keep) out.child_end_[i] = keep;
        }
        return out;
    }

    // Find the child of the root with the given original vertex label.
    int find_root_child_by_orig(int orig) const {
        for (int c = child_begin(0); c < child_end(0); ++c)
            if (orig_id_[c] == orig) return c;
        return -1;
    }

private:
    void add_root() {
        parent_.push_back(-1);
        depth_.push_back(0);
        parent_weight_.push_back(0.0);
        orig_id_.push_back(-1);
        child_begin_.push_back(1);
        child_end_.push_back(1);
    }

    std::vector<int> parent_;
    std::vector<int> depth_;
    std::vector<double> parent_weight_;
    std::vector<int> orig_id_;
    std::vector<int> child_begin_;
    std::vector<int> child_end_;
};

// T(k, lambda, F_w): every node at depth < k has Poisson(lambda) children,
// nodes at depth k have none; edge weights i.i.d. from dist.
inline RootedTree sample_gw_tree(int k, double lambda, const WeightDist& dist,
                                 std::uint64_t seed,
                                 std::size_t node_cap = kDefaultTreeNodeCap) {
    if (k < 0) throw std::invalid_argument("sample_gw_tree: k must be >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_gw_tree: lambda must be > 0");
    SplitMix64 offspring(derive_seed(seed, StreamTag::Offspring));
    SplitMix64 weights(derive_seed(seed, StreamTag::TreeWeight));
    RootedTree t;
    int level_begin = 0, level_end = 1;
    for (int d = 0; d < k; ++d) {
        for (int p = level_begin; p < level_end; ++p) {
            std::uint64_t c = offspring.next_poisson(lambda);
            for (std::uint64_t j = 0; j < c; ++j) {
                if (static_cast<std::size_t>(t.size()) >= node_cap)
                    throw TreeSizeError("sample_gw_tree: node cap " + std::to_string(node_cap) +
                                        " exceeded (k=" + std::to_string(k) +
                                        ", lambda=" + std::to_string(lambda) + ")");
                t.add_child(p, dist.sample(weights));
            }
        }
        level_begin = level_end;
        level_end = t.size();
        if (level_begin == level_end) break;
    }
    return t;
}

struct TiltedTree {
    RootedTree combined;      // base with one extra root child carrying `attached`
    RootedTree base;          // T_k
    RootedTree attached;      // T'_{k-1}
    double bridge_weight = 0; // weight of the root-to-attached-root edge
    int attached_root = -1;   // arena index of the attached root inside `combined`
};

// Combine a base tree and an attached tree by hanging the attached root off
// the base root via a bridge edge. The merge goes level by level, so the
// combined arena stays in BFS order; the attached root becomes the last
// child of the combined root.
inline TiltedTree make_tilted_tree(const RootedTree& base, const RootedTree& attached,
                                   double bridge_weight) {
    TiltedTree out;
    out.base = base;
    out.attached = attached;
    out.bridge_weight = bridge_weight;
    const RootedTree& b = out.base;
    const RootedTree& a = out.attached;
    RootedTree c;
    c.set_root_orig_id(b.orig_id(0));
    std::vector<int> map_b(b.size(), -1), map_a(a.size(), -1);
    map_b[0] = 0;
    int max_depth = std::max(b.depth(), a.depth() + 1);
    for (int d = 0; d < max_depth; ++d) {
        for (int i = 0; i < b.size(); ++i) {
            if (b.depth(i) != d || map_b[i] < 0) continue;
            for (int ch = b.child_begin(i); ch < b.child_end(i); ++ch)
                map_b[ch] = c.add_child(map_b[i], b.parent_weight(ch), b.orig_id(ch));
            if (d == 0) map_a[0] = c.add_child(0, out.bridge_weight, a.orig_id(0));
        }
        for (int i = 0; i < a.size(); ++i) {
            if (a.depth(i) != d - 1 || map_a[i] < 0) continue;
            for (int ch = a.child_begin(i); ch < a.child_end(i); ++ch)
                map_a[ch] = c.add_child(map_a[i], a.parent_weight(ch), a.orig_id(ch));
        }
    }
    out.combined = std::move(c);
    out.attached_root = map_a[0];
    return out;
}

// T~(k, lambda, F_w), constructed from (T_k, T'_{k-1}, bridge weight), all
// three from independent streams. The combined root has offspring
// distribution 1 + Poisson(lambda).
inline TiltedTree sample_tilted_tree(int k, double lambda, const WeightDist& dist,
                                     std::uint64_t seed,
                                     std::size_t node_cap = kDefaultTreeNodeCap) {
    if (k < 1) throw std::invalid_argument("sample_tilted_tree: k must be >= 1");
    RootedTree base = sample_gw_tree(k, lambda, dist, derive_seed(seed, 101), node_cap);
    RootedTree attached = sample_gw_tree(k - 1, lambda, dist, derive_seed(seed, 102), node_cap);
    SplitMix64 bridge(derive_seed(seed, StreamTag::BridgeWeight));
    return make_tilted_tree(base, attached, dist.sample(bridge));
}

} // namespace sparseopt
