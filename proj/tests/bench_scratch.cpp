// Throwaway benchmark (not part of the suite).
#include <chrono>
#include <cstdio>

#include "sparseopt/exact.hpp"
#include "sparseopt/sampling.hpp"

using namespace sparseopt;

int main() {
    for (int n : {100, 400, 1600}) {
        auto t0 = std::chrono::steady_clock::now();
        double acc = 0;
        int reps = 20;
        for (int r = 0; r < reps; ++r) {
            auto g = sample_er_graph(n, 2.0 / n, WeightDist::exp1(), derive_seed(1, r));
            acc += max_weight_matching(g).value;
        }
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
        std::printf("MWM  n=%5d  %.1f ms/solve (value/n ~ %.4f)\n", n, ms, acc / reps / n);
        t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) {
            auto g = sample_kn_lambda(n, 2.0, derive_seed(2, r));
            acc += diluted_min_matching(g, 2.0).value;
        }
        t1 = std::chrono::steady_clock::now();
        ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
        std::printf("DMM  n=%5d  %.1f ms/solve\n", n, ms);
    }
    for (int n : {50, 100, 200}) {
        double lam = 8.0 * std::log(n);
        auto t0 = std::chrono::steady_clock::now();
        int reps = 20;
        for (int r = 0; r < reps; ++r) {
            auto g = sample_kn_lambda(n, lam, derive_seed(3, r));
            diluted_edge_cover(g, lam);
        }
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
        std::printf("ECl  n=%5d  lam=%.1f  %.1f ms/solve\n", n, lam, ms);
    }
    // Complete-graph EC at truncation-check scale.
    for (int n : {50, 100}) {
        auto t0 = std::chrono::steady_clock::now();
        int reps = 10;
        for (int r = 0; r < reps; ++r) {
            auto g = sample_complete_graph(n, WeightDist::exp1(), derive_seed(4, r));
            std::vector<WeightedEdge> scaled;
            for (auto e : g.edges()) scaled.push_back({e.u, e.v, e.w * n});
            edge_cover(WeightedGraph(n, scaled));
        }
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
        std::printf("EC Kn n=%4d  %.1f ms/solve\n", n, ms);
    }
    return 0;
}
