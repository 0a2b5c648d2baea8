#pragma once

// Maximum weight matching on general graphs (blossoms, O(V^3) worst case,
// linear-space duals). The primal-dual structure follows Galil's formulation;
// vertices and blossoms share one id space [0, 2n), endpoints are 2*edge+side.
// Weights are doubles used directly; slack comparisons carry a small absolute
// tolerance so that dual updates computed in floating point still register as
// tight. An optimality certificate check against the duals is provided for
// tests.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sparseopt {

class MaxWeightMatcher {
public:
    struct Edge {
        int i, j;
        double w;
    };

    // Vertices are 0..n-1. Weights must be >= 0.
    MaxWeightMatcher(int n, std::vector<Edge> edges)
        : nvertex_(n), edges_(std::move(edges)) {
        nedge_ = static_cast<int>(edges_.size());
        maxweight_ = 0.0;
        for (const auto& e : edges_) maxweight_ = std::max(maxweight_, e.w);
        tol_ = 1e-12 * (1.0 + maxweight_);
        endpoint_.resize(2 * nedge_);
        neighbend_.assign(nvertex_, {});
        for (int k = 0; k < nedge_; ++k) {
            endpoint_[2 * k] = edges_[k].i;
            endpoint_[2 * k + 1] = edges_[k].j;
            neighbend_[edges_[k].i].push_back(2 * k + 1);
            neighbend_[edges_[k].j].push_back(2 * k);
        }
    }

    // Runs the algorithm; returns mate[v] (vertex id or -1).
    const std::vector<int>& solve() {
        const int n = nvertex_;
        mate_.assign(n, -1);
        label_.assign(2 * n, 0);
        labelend_.assign(2 * n, -1);
        inblossom_.resize(n);
        for (int v = 0; v < n; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n, -1);
        blossomchilds_.assign(2 * n, {});
        blossombase_.resize(2 * n);
        for (int v = 0; v < n; ++v) blossombase_[v] = v;
        for (int b = n; b < 2 * n; ++b) blossombase_[b] = -1;
        blossomendps_.assign(2 * n, {});
        bestedge_.assign(2 * n, -1);
        blossombestedges_.assign(2 * n, {});
        has_bestedges_.assign(2 * n, 0);
        unusedblossoms_.clear();
        for (int b = n; b < 2 * n; ++b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n, 0.0);
        for (int v = 0; v < n; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(nedge_, 0);
        queue_.clear();

        for (int t = 0; t < n; ++t) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = n; b < 2 * n; ++b) {
                blossombestedges_[b].clear();
                has_bestedges_[b] = 0;
            }
            std::fill(allowedge_.begin(), allowedge_.end(), 0);
            queue_.clear();
            for (int v = 0; v < n; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

            bool augmented = false;
            long substages = 0;
            const long substage_cap = 50L * n + 1000;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    for (int p : neighbend_[v]) {
                        int k = p / 2;
                        int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;
                        double kslack = 0.0;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            if (kslack <= tol_) allowedge_[k] = 1;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            int b = inblossom_[v];
                            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b]))
                                bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w]))
                                bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;
                if (++substages > substage_cap)
                    throw std::logic_error("MaxWeightMatcher: dual update cap exceeded");

                // Choose the least delta over the four update types.
                int deltatype = 1;
                int deltaedge = -1, deltablossom = -1;
                double delta = 0.0;
                for (int v = 0; v < n; ++v) delta = (v == 0) ? dualvar_[0] : std::min(delta, dualvar_[v]);
                delta = std::max(delta, 0.0);
                for (int v = 0; v < n; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        double d = slack(bestedge_[v]);
                        if (d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        double d = slack(bestedge_[b]) / 2.0;
                        if (d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n; b < 2 * n; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        dualvar_[b] < delta) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                delta = std::max(delta, 0.0);

                for (int v = 0; v < n; ++v) {
                    if (label_[inblossom_[v]] == 1)
                        dualvar_[v] -= delta;
                    else if (label_[inblossom_[v]] == 2)
                        dualvar_[v] += delta;
                }
                for (int b = n; b < 2 * n; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1)
                            dualvar_[b] += delta;
                        else if (label_[b] == 2)
                            dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) break;
                if (deltatype == 2) {
                    allowedge_[deltaedge] = 1;
                    int i = edges_[deltaedge].i;
                    if (label_[inblossom_[i]] == 0) i = edges_[deltaedge].j;
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = 1;
                    queue_.push_back(edges_[deltaedge].i);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) break;
            for (int b = n; b < 2 * n; ++b) {
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
                    dualvar_[b] <= tol_)
                    expand_blossom(b, true);
            }
        }

        mate_vertex_.assign(n, -1);
        for (int v = 0; v < n; ++v)
            if (mate_[v] >= 0) mate_vertex_[v] = endpoint_[mate_[v]];
        return mate_vertex_;
    }

    // Complementary-slackness certificate of the final primal/dual pair.
    bool verify_optimum(double tol_scale = 1e4) const {
        const double tol = tol_ * tol_scale;
        const int n = nvertex_;
        for (int v = 0; v < n; ++v)
            if (dualvar_[v] < -tol) return false;
        for (int b = n; b < 2 * n; ++b)
            if (blossombase_[b] >= 0 && dualvar_[b] < -tol) return false;
        for (int k = 0; k < nedge_; ++k) {
            double s = dualvar_[edges_[k].i] + dualvar_[edges_[k].j] - 2.0 * edges_[k].w;
            std::vector<int> bi{edges_[k].i}, bj{edges_[k].j};
            while (blossomparent_[bi.back()] != -1) bi.push_back(blossomparent_[bi.back()]);
            while (blossomparent_[bj.back()] != -1) bj.push_back(blossomparent_[bj.back()]);
            std::reverse(bi.begin(), bi.end());
            std::reverse(bj.begin(), bj.end());
            for (std::size_t t = 0; t < std::min(bi.size(), bj.size()); ++t) {
                if (bi[t] != bj[t]) break;
                s += 2.0 * dualvar_[bi[t]];
            }
            if (s < -tol) return false;
            bool matched = mate_vertex_[edges_[k].i] == edges_[k].j &&
                           mate_vertex_[edges_[k].j] == edges_[k].i;
            if (matched && std::abs(s) > tol) return false;
        }
        for (int v = 0; v < n; ++v)
            if (mate_vertex_[v] == -1 && dualvar_[v] > tol) return false;
        return true;
    }

private:
    double slack(int k) const {
        return dualvar_[edges_[k].i] + dualvar_[edges_[k].j] - 2.0 * edges_[k].w;
    }

    // Append all leaf vertices of blossom b to out.
    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < nvertex_) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds_[b]) blossom_leaves(t, out);
    }

    void assign_label(int w, int t, int p) {
        int b = inblossom_[w];
        assert(label_[w] == 0 && label_[b] == 0);
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            scratch_leaves_.clear();
            blossom_leaves(b, scratch_leaves_);
            for (int x : scratch_leaves_) queue_.push_back(x);
        } else {
            int base = blossombase_[b];
            assert(mate_[base] >= 0);
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    // Trace back from v and w to find a common ancestor (new blossom base),
    // or -1 if the paths end in different roots (augmenting path found).
    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            assert(label_[b] == 1);
            path.push_back(b);
            label_[b] = 5;
            assert(labelend_[b] == mate_[blossombase_[b]]);
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                assert(label_[b] == 2);
                assert(labelend_[b] >= 0);
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].i, w = edges_[k].j;
        int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            assert(labelend_[bv] >= 0);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            assert(labelend_[bw] >= 0);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        assert(label_[bb] == 1);
        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;
        scratch_leaves_.clear();
        blossom_leaves(b, scratch_leaves_);
        for (int x : scratch_leaves_) {
            if (label_[inblossom_[x]] == 2) queue_.push_back(x);
            inblossom_[x] = b;
        }
        // Merge least-slack edge lists of the sub-blossoms.
        std::vector<int> bestedgeto(2 * nvertex_, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_bestedges_[child]) {
                scratch_leaves_.clear();
                blossom_leaves(child, scratch_leaves_);
                for (int x : scratch_leaves_) {
                    nblists.emplace_back();
                    for (int p : neighbend_[x]) nblists.back().push_back(p / 2);
                }
            } else {
                nblists.push_back(blossombestedges_[child]);
            }
            for (const auto& nblist : nblists) {
                for (int ke : nblist) {
                    int i = edges_[ke].i, j = edges_[ke].j;
                    if (inblossom_[j] == b) std::swap(i, j);
                    int bj = inblossom_[j];
                    if (bj != b && label_[bj] == 1 &&
                        (bestedgeto[bj] == -1 || slack(ke) < slack(bestedgeto[bj])))
                        bestedgeto[bj] = ke;
                }
            }
            blossombestedges_[child].clear();
            has_bestedges_[child] = 0;
            bestedge_[child] = -1;
        }
        blossombestedges_[b].clear();
        for (int ke : bestedgeto)
            if (ke != -1) blossombestedges_[b].push_back(ke);
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (int ke : blossombestedges_[b])
            if (bestedge_[b] == -1 || slack(ke) < slack(bestedge_[b])) bestedge_[b] = ke;
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < nvertex_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] <= tol_) {
                expand_blossom(s, endstage);
            } else {
                scratch_leaves_.clear();
                blossom_leaves(s, scratch_leaves_);
                for (int x : scratch_leaves_) inblossom_[x] = s;
            }
        }
        if (!endstage && label_[b] == 2) {
            assert(labelend_[b] >= 0);
            int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            int j = 0;
            for (std::size_t idx = 0; idx < blossomchilds_[b].size(); ++idx)
                if (blossomchilds_[b][idx] == entrychild) j = static_cast<int>(idx);
            int jstep, endptrick;
            const int len = static_cast<int>(blossomchilds_[b].size());
            if (j & 1) {
                j -= len;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            auto child_at = [&](int idx) { return blossomchilds_[b][(idx % len + len) % len]; };
            auto endp_at = [&](int idx) { return blossomendps_[b][(idx % len + len) % len]; };
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endp_at(j - endptrick) ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endp_at(j - endptrick) / 2] = 1;
                j += jstep;
                p = endp_at(j - endptrick) ^ endptrick;
                allowedge_[p / 2] = 1;
                j += jstep;
            }
            int bv = child_at(j);
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(j) != entrychild) {
                bv = child_at(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                scratch_leaves_.clear();
                blossom_leaves(bv, scratch_leaves_);
                int labeled = -1;
                for (int x : scratch_leaves_) {
                    if (label_[x] != 0) {
                        labeled = x;
                        break;
                    }
                }
                if (labeled >= 0) {
                    assert(label_[labeled] == 2);
                    assert(inblossom_[labeled] == bv);
                    label_[labeled] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(labeled, 2, labelend_[labeled]);
                }
                j += jstep;
            }
        }
        label_[b] = -1;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    // Swap matched/unmatched edges over the alternating path through blossom b
    // between vertex v and the base.
    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nvertex_) augment_blossom(t, v);
        const int len = static_cast<int>(blossomchilds_[b].size());
        int i = 0;
        for (std::size_t idx = 0; idx < blossomchilds_[b].size(); ++idx)
            if (blossomchilds_[b][idx] == t) i = static_cast<int>(idx);
        int j = i, jstep, endptrick;
        if (i & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        auto child_at = [&](int idx) { return blossomchilds_[b][(idx % len + len) % len]; };
        auto endp_at = [&](int idx) { return blossomendps_[b][(idx % len + len) % len]; };
        while (j != 0) {
            j += jstep;
            t = child_at(j);
            int p = endp_at(j - endptrick) ^ endptrick;
            if (t >= nvertex_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = child_at(j);
            if (t >= nvertex_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i,
                    blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i,
                    blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == v);
    }

    void augment_matching(int k) {
        const int pairs[2][2] = {{edges_[k].i, 2 * k + 1}, {edges_[k].j, 2 * k}};
        for (const auto& sp : pairs) {
            int s = sp[0], p = sp[1];
            while (true) {
                int bs = inblossom_[s];
                assert(label_[bs] == 1);
                assert(labelend_[bs] == mate_[blossombase_[bs]]);
                if (bs >= nvertex_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                int t = endpoint_[labelend_[bs]];
                int bt = inblossom_[t];
                assert(label_[bt] == 2);
                assert(labelend_[bt] >= 0);
                s = endpoint_[labelend_[bt]];
                int j = endpoint_[labelend_[bt] ^ 1];
                assert(blossombase_[bt] == t);
                if (bt >= nvertex_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    int nvertex_;
    int nedge_;
    std::vector<Edge> edges_;
    double maxweight_;
    double tol_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> mate_vertex_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
    std::vector<int> scratch_leaves_;
};

} // namespace sparseopt
