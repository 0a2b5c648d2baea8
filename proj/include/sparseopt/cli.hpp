#pragma once

// Config-driven experiment runner. One experiment per flat JSON file; every
// run writes a CSV (plus a .meta.json sidecar with the full config, version
// and wall time) and is byte-reproducible from (config, master_seed).
// Exit conventions: 0 success, 1 input error, 2 assertion-style failure
// (a soundness experiment found a violation).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparseopt/cavity.hpp"
#include "sparseopt/clt.hpp"
#include "sparseopt/csv.hpp"
#include "sparseopt/exact.hpp"
#include "sparseopt/parallel.hpp"
#include "sparseopt/sampling.hpp"
#include "sparseopt/serialize.hpp"
#include "sparseopt/version.hpp"
#include "sparseopt/vlambda.hpp"

namespace sparseopt::cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> output_files;
    std::string summary;
};

namespace detail {

inline void require_keys(const json& cfg, const std::set<std::string>& required,
                         const std::set<std::string>& optional) {
    for (const auto& key : required)
        if (!cfg.contains(key)) throw ConfigError("missing required key: " + key);
    for (auto it = cfg.begin(); it != cfg.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key()))
            throw ConfigError("unknown key: " + it.key());
}

inline double positive(const json& cfg, const std::string& key) {
    double v = cfg.at(key).get<double>();
    if (!(v > 0.0)) throw ConfigError("key " + key + " must be positive");
    return v;
}

inline int positive_int(const json& cfg, const std::string& key) {
    int v = cfg.at(key).get<int>();
    if (v <= 0) throw ConfigError("key " + key + " must be positive");
    return v;
}

inline Problem parse_problem(const std::string& s) {
    if (s == "mwm") return Problem::MaxWeightMatching;
    if (s == "dmm") return Problem::DilutedMinMatching;
    if (s == "ec") return Problem::EdgeCover;
    if (s == "ec_lambda") return Problem::DilutedEdgeCover;
    throw ConfigError("unknown problem: " + s + " (expected mwm|dmm|ec|ec_lambda)");
}

inline std::vector<int> int_list(const json& cfg, const std::string& key) {
    std::vector<int> out;
    for (const auto& v : cfg.at(key)) {
        int n = v.get<int>();
        if (n <= 0) throw ConfigError("key " + key + " must hold positive integers");
        out.push_back(n);
    }
    if (out.empty()) throw ConfigError("key " + key + " must be non-empty");
    return out;
}

inline WeightedGraph graph_from_config(const json& cfg) {
    if (cfg.contains("graph_file")) {
        std::ifstream in(cfg.at("graph_file").get<std::string>());
        if (!in) throw ConfigError("cannot open graph_file");
        return read_graph(in);
    }
    const json& g = cfg.at("graph");
    int n = g.at("n").get<int>();
    std::vector<WeightedEdge> edges;
    for (const auto& e : g.at("edges"))
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    return WeightedGraph(n, std::move(edges));
}

struct Emitter {
    std::string prefix;
    json meta;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> files;

    std::ofstream open_csv(const std::string& suffix) {
        std::string path = prefix + suffix;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + path);
        files.push_back(path);
        return out;
    }

    void finish() {
        meta["version"] = kVersion;
        meta["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string path = prefix + ".meta.json";
        std::ofstream out(path, std::ios::binary);
        out << meta.dump(2) << "\n";
        files.push_back(path);
    }
};

} // namespace detail

// Validates a config without running it. Throws ConfigError on problems.
inline void validate_config(const json& cfg) {
    using detail::require_keys;
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (!cfg.contains("experiment")) throw ConfigError("missing required key: experiment");
    const std::string exp = cfg.at("experiment").get<std::string>();
    const std::set<std::string> common{"experiment", "output", "master_seed", "workers"};
    auto with_common = [&](std::set<std::string> req, std::set<std::string> opt) {
        opt.insert(common.begin(), common.end());
        require_keys(cfg, req, opt);
    };
    if (exp == "solve") {
        with_common({"problem"}, {"graph", "graph_file", "lambda"});
        if (cfg.contains("graph") == cfg.contains("graph_file"))
            throw ConfigError("solve: provide exactly one of graph, graph_file");
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        if ((p == Problem::DilutedMinMatching || p == Problem::DilutedEdgeCover) &&
            !cfg.contains("lambda"))
            throw ConfigError("missing required key: lambda");
    } else if (exp == "bracket") {
        with_common({"problem", "n", "lambda", "k", "reps"}, {});
        detail::parse_problem(cfg.at("problem").get<std::string>());
    } else if (exp == "delta_k") {
        with_common({"problem", "lambda", "k_list", "n_samples"}, {});
        detail::parse_problem(cfg.at("problem").get<std::string>());
    } else if (exp == "vlambda") {
        with_common({"lambda", "k_max"}, {});
    } else if (exp == "vlambda6") {
        with_common({"lambda_list"}, {"m", "k_max"});
    } else if (exp == "clt") {
        with_common({"problem", "n_list", "reps"}, {"lambda", "lambda_rule"});
        if (cfg.contains("lambda") == cfg.contains("lambda_rule"))
            throw ConfigError("clt: provide exactly one of lambda, lambda_rule");
        if (cfg.contains("lambda_rule") && cfg.at("lambda_rule").get<std::string>() != "8logn")
            throw ConfigError("clt: unknown lambda_rule (expected \"8logn\")");
    } else if (exp == "varprofile") {
        with_common({"problem", "lambda", "n_list", "reps"}, {});
    } else if (exp == "truncation") {
        with_common({"n", "reps"}, {});
    } else if (exp == "treeprob") {
        with_common({"n_list", "lambda", "k", "reps"}, {});
    } else if (exp == "coupling") {
        with_common({"n_list", "lambda", "k", "reps", "statistic"}, {});
        auto s = cfg.at("statistic").get<std::string>();
        if (s != "root_degree" && s != "node_count")
            throw ConfigError("coupling: statistic must be root_degree or node_count");
    } else if (exp == "identity") {
        with_common({"n", "lambda", "reps"}, {});
    } else {
        throw ConfigError("unknown experiment: " + exp);
    }
}

// Runs a validated config. Seed/output/workers may be overridden by caller.
inline RunResult run_config(json cfg, std::optional<std::uint64_t> seed_override = {},
                            const std::string& output_dir = "") {
    validate_config(cfg);
    if (seed_override) cfg["master_seed"] = *seed_override;
    const std::string exp = cfg.at("experiment").get<std::string>();
    const std::uint64_t seed = cfg.value("master_seed", std::uint64_t{1});
    int workers = cfg.value("workers", 0);
    if (workers <= 0) workers = default_workers();

    std::string prefix = cfg.value("output", exp);
    if (!output_dir.empty() && !prefix.empty() && prefix.front() != '/')
        prefix = output_dir + "/" + prefix;

    detail::Emitter em;
    em.prefix = prefix;
    em.meta["config"] = cfg;

    RunResult result;
    std::ostringstream summary;

    if (exp == "solve") {
        auto g = detail::graph_from_config(cfg);
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        Solution sol;
        switch (p) {
            case Problem::MaxWeightMatching: sol = max_weight_matching(g); break;
            case Problem::DilutedMinMatching:
                sol = diluted_min_matching(g, detail::positive(cfg, "lambda"));
                break;
            case Problem::EdgeCover: sol = edge_cover(g); break;
            case Problem::DilutedEdgeCover:
                sol = diluted_edge_cover(g, detail::positive(cfg, "lambda"));
                break;
        }
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"problem", "n", "m", "lambda", "value", "edges"});
        std::ostringstream edges;
        for (std::size_t i = 0; i < sol.chosen_edges.size(); ++i) {
            if (i) edges << ' ';
            edges << sol.chosen_edges[i].first << '-' << sol.chosen_edges[i].second;
        }
        csv.line({problem_name(p), cell(g.n()), cell(g.edge_count()),
                  cell(sol.lambda.value_or(0.0)), cell(sol.value), edges.str()});
        summary << "value " << csv_double(sol.value);
    } else if (exp == "bracket") {
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        int n = detail::positive_int(cfg, "n");
        double lambda = detail::positive(cfg, "lambda");
        int k = detail::positive_int(cfg, "k");
        int reps = detail::positive_int(cfg, "reps");
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"rep", "is_tree", "lower", "upper", "exact", "inside"});
        int trees = 0, violations = 0;
        for (int rep = 0; rep < reps; ++rep) {
            std::uint64_t s = derive_seed(seed, rep);
            WeightedGraph g = p == Problem::MaxWeightMatching
                                  ? sample_er_graph(n, lambda / n, WeightDist::exp1(), s)
                                  : sample_kn_lambda(n, lambda, s);
            auto nb = neighborhood(g, 0, k);
            if (!nb.is_tree) {
                csv.line({cell(rep), "0", "", "", "", ""});
                continue;
            }
            ++trees;
            CavityBracket br;
            double exact = 0.0;
            if (p == Problem::MaxWeightMatching) {
                br = mwm_bracket(nb);
                exact = max_weight_matching(g).value -
                        max_weight_matching(delete_vertices(g, {0})).value;
            } else if (p == Problem::DilutedMinMatching) {
                br = dmm_cavity_bracket(*nb.as_tree, k, lambda);
                exact = diluted_min_matching(g, lambda).value -
                        diluted_min_matching(delete_vertices(g, {0}), lambda).value;
            } else {
                br = ec_cavity_bracket(*nb.as_tree, k, lambda);
                std::vector<int> all, rest;
                for (int v = 0; v < g.n(); ++v) all.push_back(v);
                for (int v = 1; v < g.n(); ++v) rest.push_back(v);
                exact = diluted_edge_cover_subset(g, lambda, all) -
                        diluted_edge_cover_subset(g, lambda, rest);
            }
            bool inside = exact >= br.lower - 1e-9 && exact <= br.upper + 1e-9;
            if (!inside) ++violations;
            csv.line({cell(rep), "1", cell(br.lower), cell(br.upper), cell(exact),
                      inside ? "1" : "0"});
        }
        em.meta["trees"] = trees;
        em.meta["violations"] = violations;
        summary << trees << " tree instances, " << violations << " violations";
        if (violations > 0) result.exit_code = 2;
    } else if (exp == "delta_k") {
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        double lambda = detail::positive(cfg, "lambda");
        int n_samples = detail::positive_int(cfg, "n_samples");
        auto dist = p == Problem::MaxWeightMatching ? WeightDist::exp1()
                                                    : WeightDist::uniform(lambda);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"problem", "k", "lambda", "n_samples", "mean_sq", "std_err"});
        for (int k : detail::int_list(cfg, "k_list")) {
            auto est = estimate_delta_k(p, k, lambda, dist, n_samples, derive_seed(seed, k),
                                        workers);
            csv.line({problem_name(p), cell(k), cell(lambda), cell(est.n_samples),
                      cell(est.mean_sq), cell(est.std_err)});
        }
        summary << "delta_k rows written";
    } else if (exp == "vlambda") {
        double lambda = detail::positive(cfg, "lambda");
        int k_max = detail::positive_int(cfg, "k_max");
        auto rep = convergence_bound_check(lambda, k_max);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"lambda", "k", "a_k", "b_k", "gap", "bound", "pass"});
        for (const auto& row : rep.rows)
            csv.line({cell(lambda), cell(row.k), cell(row.a_k), cell(row.b_k), cell(row.gap_b),
                      cell(row.bound_b), row.pass ? "1" : "0"});
        em.meta["a_lambda"] = rep.a_fixed;
        em.meta["all_pass"] = rep.all_pass;
        summary << "A_lambda " << csv_double(rep.a_fixed)
                << (rep.all_pass ? ", all bounds hold" : ", BOUND VIOLATION");
        if (!rep.all_pass || !rep.sandwich_ok) result.exit_code = 2;
    } else if (exp == "vlambda6") {
        int m = cfg.value("m", 1024);
        int k_max = cfg.value("k_max", 120);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"lambda", "alpha_hat", "m", "k_max"});
        for (const auto& lv : cfg.at("lambda_list")) {
            double lambda = lv.get<double>();
            auto rep = matching_operator_iterate(lambda, m, k_max);
            csv.line({cell(lambda), cell(rep.alpha_hat), cell(m), cell(k_max)});
            if (!rep.contracting) summary << "non-contraction flagged at lambda=" << lambda << "; ";
        }
        summary << "alpha_hat sweep written";
    } else if (exp == "clt") {
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        int reps = detail::positive_int(cfg, "reps");
        bool rule = cfg.contains("lambda_rule");
        auto reps_out = em.open_csv("_replicates.csv");
        CsvWriter rep_csv(reps_out);
        rep_csv.header({"seed", "n", "lambda", "problem", "value"});
        auto ks_out = em.open_csv("_ks.csv");
        CsvWriter ks_csv(ks_out);
        ks_csv.header({"problem", "n", "lambda", "reps", "ks", "mean", "sd"});
        std::size_t idx = 0;
        for (int n : detail::int_list(cfg, "n_list")) {
            double lambda = rule ? 8.0 * std::log(n) : cfg.at("lambda").get<double>();
            auto records = run_replicates(p, n, lambda, reps, derive_seed(seed, idx++), workers);
            for (const auto& r : records)
                rep_csv.line({cell(r.seed), cell(r.n), cell(r.lambda),
                              problem_name(r.problem), cell(r.value)});
            auto ks = ks_to_normal(records);
            ks_csv.line({problem_name(p), cell(n), cell(lambda), cell(ks.n_reps),
                         cell(ks.ks_distance), cell(ks.mean), cell(ks.sd)});
            summary << "n=" << n << " ks=" << csv_double(ks.ks_distance) << "; ";
        }
    } else if (exp == "varprofile") {
        auto p = detail::parse_problem(cfg.at("problem").get<std::string>());
        double lambda = detail::positive(cfg, "lambda");
        int reps = detail::positive_int(cfg, "reps");
        auto rows = variance_profile(p, lambda, detail::int_list(cfg, "n_list"), reps, seed,
                                     workers);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"problem", "lambda", "n", "var_over_n"});
        for (const auto& row : rows)
            csv.line({problem_name(p), cell(lambda), cell(row.n), cell(row.var_over_n)});
        summary << "variance profile written";
    } else if (exp == "truncation") {
        int n = detail::positive_int(cfg, "n");
        int reps = detail::positive_int(cfg, "reps");
        auto rep = ec_truncation_check(n, reps, seed, workers);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"n", "reps", "lambda_log_n", "eq_4k", "eq_log_n", "max_diff_4k"});
        csv.line({cell(rep.n), cell(rep.reps), cell(rep.lambda_log_n), cell(rep.eq_4k),
                  cell(rep.eq_log_n), cell(rep.max_diff_4k)});
        summary << "eq_4k " << rep.eq_4k << "/" << reps << ", eq_log_n " << rep.eq_log_n << "/"
                << reps;
        if (rep.eq_4k != reps) result.exit_code = 2;
    } else if (exp == "treeprob") {
        double lambda = detail::positive(cfg, "lambda");
        int k = cfg.at("k").get<int>();
        int reps = detail::positive_int(cfg, "reps");
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"n", "k", "lambda", "reps", "p_tree", "se"});
        std::size_t idx = 0;
        for (int n : detail::int_list(cfg, "n_list")) {
            auto rep = tree_probability(n, lambda, k, reps, derive_seed(seed, idx++), workers);
            csv.line({cell(rep.n), cell(rep.k), cell(rep.lambda), cell(rep.reps),
                      cell(rep.p_tree), cell(rep.se)});
            summary << "n=" << n << " p_tree=" << csv_double(rep.p_tree) << "; ";
        }
    } else if (exp == "coupling") {
        double lambda = detail::positive(cfg, "lambda");
        int k = cfg.at("k").get<int>();
        int reps = detail::positive_int(cfg, "reps");
        auto stat = cfg.at("statistic").get<std::string>() == "root_degree"
                        ? CouplingStatistic::RootDegree
                        : CouplingStatistic::NodeCount;
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"n", "k", "lambda", "reps", "statistic", "tv", "bootstrap_se"});
        std::size_t idx = 0;
        for (int n : detail::int_list(cfg, "n_list")) {
            auto rep = coupling_statistic_tv(n, lambda, k, reps, stat, derive_seed(seed, idx++),
                                             workers);
            csv.line({cell(rep.n), cell(rep.k), cell(rep.lambda), cell(rep.reps),
                      cfg.at("statistic").get<std::string>(), cell(rep.tv),
                      cell(rep.bootstrap_se)});
            summary << "n=" << n << " tv=" << csv_double(rep.tv) << "; ";
        }
    } else if (exp == "identity") {
        int n = detail::positive_int(cfg, "n");
        double lambda = detail::positive(cfg, "lambda");
        int reps = detail::positive_int(cfg, "reps");
        auto rep = perturbation_identity_check(n, lambda, reps, seed, workers);
        auto out = em.open_csv(".csv");
        CsvWriter csv(out);
        csv.header({"n", "lambda", "reps", "passes", "max_abs_diff"});
        csv.line({cell(rep.n), cell(rep.lambda), cell(rep.reps), cell(rep.passes),
                  cell(rep.max_abs_diff)});
        summary << rep.passes << "/" << reps << " identities hold";
        if (rep.passes != reps) result.exit_code = 2;
    }

    em.finish();
    result.output_files = em.files;
    result.summary = summary.str();
    return result;
}

inline RunResult run_config_file(const std::string& path,
                                 std::optional<std::uint64_t> seed_override = {},
                                 const std::string& output_dir = "") {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return run_config(std::move(cfg), seed_override, output_dir);
}

} // namespace sparseopt::cli
