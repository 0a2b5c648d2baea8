#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparseopt/cli.hpp"
#include "sparseopt/exact.hpp"

using namespace sparseopt;
using sparseopt::cli::ConfigError;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sparseopt_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config validation rejects malformed input") {
    CHECK_THROWS_AS(cli::validate_config(json::array()), ConfigError);
    CHECK_THROWS_AS(cli::validate_config(json{{"foo", 1}}), ConfigError);
    CHECK_THROWS_AS(cli::validate_config(json{{"experiment", "nope"}}), ConfigError);

    // Missing lambda is reported by key name.
    json cfg{{"experiment", "bracket"}, {"problem", "mwm"}, {"n", 20}, {"k", 2}, {"reps", 5}};
    try {
        cli::validate_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lambda") != std::string::npos);
    }

    // Unknown keys are rejected by name.
    cfg["lambda"] = 2.0;
    cfg["lambdaa"] = 3.0;
    try {
        cli::validate_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lambdaa") != std::string::npos);
    }

    // clt needs exactly one of lambda / lambda_rule.
    json clt{{"experiment", "clt"}, {"problem", "mwm"}, {"n_list", {50}}, {"reps", 100}};
    CHECK_THROWS_AS(cli::validate_config(clt), ConfigError);
    clt["lambda"] = 2.0;
    clt["lambda_rule"] = "8logn";
    CHECK_THROWS_AS(cli::validate_config(clt), ConfigError);
}

TEST_CASE("solve experiment matches brute force on an inline graph") {
    TempDir tmp;
    json cfg{{"experiment", "solve"},
             {"problem", "mwm"},
             {"output", "solve_test"},
             {"graph", {{"n", 4}, {"edges", {{0, 1, 2.5}, {1, 2, 1.0}, {2, 3, 3.0}}}}}};
    auto res = cli::run_config(cfg, std::nullopt, tmp.str());
    CHECK(res.exit_code == 0);
    auto g = WeightedGraph(4, {{0, 1, 2.5}, {1, 2, 1.0}, {2, 3, 3.0}});
    double expect = brute_force(Problem::MaxWeightMatching, g);
    CHECK(res.summary.find(csv_double(expect)) != std::string::npos);
    auto csv = slurp(tmp.str() + "/solve_test.csv");
    CHECK(csv.find("problem,n,m,lambda,value,edges") == 0);
    CHECK(csv.find(csv_double(expect)) != std::string::npos);
}

TEST_CASE("vlambda experiment emits k_max+1 rows and converges") {
    TempDir tmp;
    json cfg{{"experiment", "vlambda"}, {"lambda", 2.0}, {"k_max", 60}, {"output", "vl"}};
    auto res = cli::run_config(cfg, std::nullopt, tmp.str());
    CHECK(res.exit_code == 0);
    auto csv = slurp(tmp.str() + "/vl.csv");
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 62); // header + 61 rows (k = 0..60)

    // b_60 - A_2 < 1e-10, read back from the last row.
    auto last = csv.rfind("\n", csv.size() - 2);
    std::istringstream row(csv.substr(last + 1));
    std::string cell_str;
    std::vector<std::string> cells;
    while (std::getline(row, cell_str, ',')) cells.push_back(cell_str);
    REQUIRE(cells.size() == 7);
    double b60 = std::stod(cells[3]);
    double a = fixed_point_A(2.0);
    CHECK(std::abs(b60 - a) < 1e-10);
    CHECK(cells[6] == "1\n");
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
    TempDir tmp;
    json cfg{{"experiment", "clt"},     {"problem", "dmm"}, {"n_list", {30}},
             {"lambda", 2.0},           {"reps", 60},       {"master_seed", 42},
             {"output", "golden_a"},    {"workers", 1}};
    cli::run_config(cfg, std::nullopt, tmp.str());
    cfg["output"] = "golden_b";
    cfg["workers"] = 3;
    cli::run_config(cfg, std::nullopt, tmp.str());
    CHECK(slurp(tmp.str() + "/golden_a_replicates.csv") ==
          slurp(tmp.str() + "/golden_b_replicates.csv"));
    CHECK(slurp(tmp.str() + "/golden_a_ks.csv") == slurp(tmp.str() + "/golden_b_ks.csv"));
}

TEST_CASE("bracket experiment reports violations through the exit code") {
    TempDir tmp;
    json cfg{{"experiment", "bracket"}, {"problem", "dmm"}, {"n", 30},
             {"lambda", 2.0},           {"k", 2},           {"reps", 40},
             {"output", "br"}};
    auto res = cli::run_config(cfg, std::nullopt, tmp.str());
    CHECK(res.exit_code == 0); // soundness holds, so no violations
    auto csv = slurp(tmp.str() + "/br.csv");
    CHECK(csv.find("rep,is_tree,lower,upper,exact,inside") == 0);

    // Meta sidecar carries config echo and version.
    auto meta = json::parse(slurp(tmp.str() + "/br.meta.json"));
    CHECK(meta.at("config").at("experiment") == "bracket");
    CHECK(meta.at("version") == std::string(kVersion));
    CHECK(meta.at("violations") == 0);
}

TEST_CASE("identity and truncation experiments run clean") {
    TempDir tmp;
    json id_cfg{{"experiment", "identity"}, {"n", 5}, {"lambda", 2.0}, {"reps", 30},
                {"output", "idn"}};
    CHECK(cli::run_config(id_cfg, std::nullopt, tmp.str()).exit_code == 0);

    json tr_cfg{{"experiment", "truncation"}, {"n", 20}, {"reps", 20}, {"output", "trn"}};
    CHECK(cli::run_config(tr_cfg, std::nullopt, tmp.str()).exit_code == 0);
}

TEST_CASE("seed override changes outputs deterministically") {
    TempDir tmp;
    json cfg{{"experiment", "treeprob"}, {"n_list", {100}}, {"lambda", 2.0},
             {"k", 2},                   {"reps", 200},     {"output", "tp1"}};
    cli::run_config(cfg, 7, tmp.str());
    cfg["output"] = "tp2";
    cli::run_config(cfg, 7, tmp.str());
    cfg["output"] = "tp3";
    cli::run_config(cfg, 8, tmp.str());
    CHECK(slurp(tmp.str() + "/tp1.csv") == slurp(tmp.str() + "/tp2.csv"));
    CHECK(slurp(tmp.str() + "/tp1.csv") != slurp(tmp.str() + "/tp3.csv"));
}
