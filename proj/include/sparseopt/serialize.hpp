#pragma once

// Text formats. Graphs: line-based, header "n <count>", one "u v w" line per
// edge, weights at 17 significant digits (round-trips exactly). Trees:
// parenthesized preorder, each child printed as "w(subtree)"; used by the
// CLI to dump counterexample trees.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparseopt/graph.hpp"
#include "sparseopt/tree.hpp"

namespace sparseopt {

inline std::string format_weight(double w) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", w);
    return buf;
}

inline void write_graph(std::ostream& os, const WeightedGraph& g) {
    if (g.active_count() != g.n())
        throw std::invalid_argument("write_graph: graphs with deleted vertices not supported");
    os << "n " << g.n() << "\n";
    for (const auto& e : g.edges())
        os << e.u << " " << e.v << " " << format_weight(e.w) << "\n";
}

inline std::string graph_to_string(const WeightedGraph& g) {
    std::ostringstream ss;
    write_graph(ss, g);
    return ss.str();
}

inline WeightedGraph read_graph(std::istream& is) {
    std::string tag;
    int n = -1;
    if (!(is >> tag >> n) || tag != "n" || n < 0)
        throw std::invalid_argument("read_graph: expected header 'n <count>'");
    std::vector<WeightedEdge> edges;
    int u, v;
    double w;
    while (is >> u >> v >> w) edges.push_back({u, v, w});
    return WeightedGraph(n, std::move(edges));
}

inline WeightedGraph graph_from_string(const std::string& s) {
    std::istringstream ss(s);
    return read_graph(ss);
}

namespace detail {

inline void write_subtree(std::ostream& os, const RootedTree& t, int node) {
    os << "(";
    for (int c = t.child_begin(node); c < t.child_end(node); ++c) {
        os << format_weight(t.parent_weight(c));
        write_subtree(os, t, c);
    }
    os << ")";
}

} // namespace detail

inline void write_tree(std::ostream& os, const RootedTree& t) {
    detail::write_subtree(os, t, 0);
    os << "\n";
}

inline std::string tree_to_string(const RootedTree& t) {
    std::ostringstream ss;
    detail::write_subtree(ss, t, 0);
    return ss.str();
}

// Parse the parenthesized preorder format. A first pass builds a temporary
// pointer tree; a second pass lays it out in BFS arena order.
inline RootedTree tree_from_string(const std::string& s) {
    struct TmpNode {
        double w = 0.0;
        std::vector<int> kids;
    };
    std::vector<TmpNode> tmp(1);
    std::size_t pos = 0;
    auto fail = [&]() {
        throw std::invalid_argument("tree parse error at offset " + std::to_string(pos));
    };
    // Recursive descent with an explicit stack of open nodes.
    std::vector<int> stack;
    if (pos >= s.size() || s[pos] != '(') fail();
    stack.push_back(0);
    ++pos;
    while (!stack.empty()) {
        if (pos >= s.size()) fail();
        if (s[pos] == ')') {
            stack.pop_back();
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < s.size() && s[end] != '(' && s[end] != ')') ++end;
        if (end == pos || end >= s.size() || s[end] != '(') fail();
        TmpNode child;
        child.w = std::stod(s.substr(pos, end - pos));
        tmp.push_back(child);
        int id = static_cast<int>(tmp.size()) - 1;
        tmp[stack.back()].kids.push_back(id);
        stack.push_back(id);
        pos = end + 1;
    }
    while (pos < s.size() && (s[pos] == '\n' || s[pos] == ' ')) ++pos;
    if (pos != s.size()) fail();

    RootedTree t;
    std::vector<std::pair<int, int>> frontier{{0, 0}}; // (tmp id, arena id)
    while (!frontier.empty()) {
        std::vector<std::pair<int, int>> next;
        for (auto [tid, aid] : frontier)
            for (int kid : tmp[tid].kids) next.push_back({kid, t.add_child(aid, tmp[kid].w)});
        frontier = std::move(next);
    }
    return t;
}

} // namespace sparseopt
