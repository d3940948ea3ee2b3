#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "finfo/csv.hpp"
#include "finfo/estimation.hpp"
#include "finfo/json.hpp"

namespace fs = std::filesystem;
using finfo::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    json record() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = finfo::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        ::unsetenv("USABLE_INFO_SEED");
        dir_ = fs::temp_directory_path() /
               ("finfo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateFormatAndDeterminism) {
    const auto r = run({"simulate", "--scenario", "sim1", "--seed", "7", "--n", "25", "--out", path("a.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("a.csv"));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(finfo::split_csv_line(header).size(), 200u);
    EXPECT_EQ(header.substr(0, 14), "var0_0,var0_1,");
    ASSERT_EQ(run({"simulate", "--scenario", "sim1", "--seed", "7", "--n", "25", "--out", path("b.csv")}).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const json truth = json::parse(slurp(path("a.csv.truth.json")));
    EXPECT_EQ(truth.at("command"), "simulate");
    EXPECT_EQ(truth.at("seed"), 7);
    EXPECT_EQ(truth.at("config").at("scenario"), "sim1");
    EXPECT_EQ(truth.at("result").at("truth").at("tree").at("root"), 0);
}

TEST_F(Cli, SimulateRoundTripsThroughCsv) {
    ASSERT_EQ(run({"simulate", "--scenario", "sim6", "--seed", "3", "--n", "30", "--d", "4", "--out", path("a.csv")}).code, 0);
    finfo::SimulationConfig c;
    c.scenario = finfo::Scenario::sim6;
    c.seed = 3;
    c.n = 30;
    c.d = 4;
    const auto expected = finfo::simulate(c).first;
    std::ifstream in(path("a.csv"));
    const auto back = finfo::read_dataset_csv(in);
    ASSERT_EQ(back.variable_count(), expected.variable_count());
    for (std::size_t v = 0; v < back.variable_count(); ++v)
        EXPECT_EQ(back.variables[v].values, expected.variables[v].values);
}

TEST_F(Cli, MissingSeedIsUsageError) {
    const auto r = run({"simulate", "--scenario", "sim1", "--out", path("a.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no seed"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST_F(Cli, SeedFromEnvironment) {
    ::setenv("USABLE_INFO_SEED", "7", 1);
    ASSERT_EQ(run({"simulate", "--scenario", "sim2", "--n", "10", "--out", path("a.csv")}).code, 0);
    ::unsetenv("USABLE_INFO_SEED");
    ASSERT_EQ(run({"simulate", "--scenario", "sim2", "--n", "10", "--seed", "7", "--out", path("b.csv")}).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
    write("sim.json", R"({"scenario": "sim4", "seed": 5, "n": 12, "d": 2})");
    ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--n", "9", "--out", path("a.csv")}).code, 0);
    std::ifstream in(path("a.csv"));
    const auto data = finfo::read_dataset_csv(in);
    EXPECT_EQ(data.sample_count(), 9);
    EXPECT_EQ(data.variable_count(), 7u);
    write("bad.json", R"({"scenario": "sim4", "colour": 1})");
    EXPECT_EQ(run({"simulate", "--config", path("bad.json"), "--out", path("b.csv")}).code, 2);
}

TEST_F(Cli, EstimatePerfectCorrelation) {
    write("d.csv", "var0_0,var1_0\n1,3\n2,5\n4,9\n7,15\n");
    const auto r = run({"estimate", "--data", path("d.csv"), "--x", "var0", "--y", "var1", "--family",
                        "linear_gaussian"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::vector<double> y{3, 5, 9, 15};
    double mean = 0, var = 0;
    for (double v : y) mean += v / 4;
    for (double v : y) var += (v - mean) * (v - mean) / 4;
    EXPECT_NEAR(r.record().at("result").at("point_estimate").get<double>(), var, 1e-9);
    EXPECT_EQ(r.record().at("result").at("units"), "nats");
}

TEST_F(Cli, EstimatePacHalfWidth) {
    std::ostringstream csv;
    csv << "var0_0,var1_0\n";
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        csv << x << ',' << 0.5 * x + 0.1 * u(rng) << '\n';
    }
    write("d.csv", csv.str());
    const auto r = run({"estimate", "--data", path("d.csv"), "--x", "var0", "--y", "var1", "--pac", "--kx", "1",
                        "--ky", "1", "--delta", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rec = r.record();
    const double m = 4 + std::log(2 * M_PI);
    const double expected = m / std::sqrt(4.0 * 50) * (1 + 4 * std::sqrt(2 * std::log(10.0)));
    EXPECT_NEAR(rec.at("result").at("pac").at("half_width").get<double>(), expected, 1e-12);
    EXPECT_EQ(rec.at("config").at("norm_radius"), 1.0);
}

TEST_F(Cli, EstimateMalformedCsv) {
    const auto r = run({"estimate", "--data", std::string(FINFO_TEST_DATA) + "/malformed.csv", "--x", "var0",
                        "--y", "var1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, EstimateNonConvergenceExitsFour) {
    write("d.csv", "var0_0,var1_0\n1,3\n2,5\n4,9\n7,16\n");
    const auto r = run({"estimate", "--data", path("d.csv"), "--x", "var0", "--y", "var1", "--fit-mode",
                        "gradient", "--max-iters", "1"});
    EXPECT_EQ(r.code, 4);
    EXPECT_FALSE(r.record().at("result").at("converged").get<bool>());
}

TEST_F(Cli, EstimateUnknownFamily) {
    write("d.csv", "var0_0,var1_0\n1,3\n2,5\n");
    EXPECT_EQ(run({"estimate", "--data", path("d.csv"), "--x", "var0", "--y", "var1", "--family", "mlp"}).code, 2);
    EXPECT_EQ(run({"estimate", "--data", path("missing.csv"), "--x", "var0", "--y", "var1"}).code, 3);
}

TEST_F(Cli, TreeMatchesGolden) {
    const auto r = run({"tree", "--scenario", "sim1", "--n", "1000", "--seed", "7", "--family", "linear_gaussian"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rec = r.record();
    EXPECT_EQ(rec.at("result").at("wrong_edges_ratio"), 0.0);
    const json golden = json::parse(slurp(std::string(FINFO_TEST_DATA) + "/sim1_n1000_seed7_tree.json"));
    EXPECT_EQ(rec.at("result").at("tree").at("parents"), golden.at("parents"));
    EXPECT_EQ(rec.at("result").at("tree").at("root"), golden.at("root"));
}

TEST_F(Cli, TreeAgreesWithBruteForce) {
    const auto r = run({"tree", "--scenario", "sim1", "--m", "6", "--d", "3", "--n", "40", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json res = r.record().at("result");
    finfo::EdgeWeightMatrix w{finfo::Matrix(6, 6)};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) w.w(i, j) = res.at("edge_weights").at(i).at(j).get<double>();
    const auto slow = finfo::brute_force_arborescence(w);
    EXPECT_EQ(res.at("tree").at("parents").get<std::vector<int>>(), slow.parent);
    EXPECT_EQ(res.at("C_hat").get<double>(), slow.total_weight);
}

TEST_F(Cli, TreeTwoVariablesAndNoTruth) {
    write("d.csv", "var0_0,var1_0\n1,3\n2,5.5\n4,9\n7,15\n");
    const auto r = run({"tree", "--data", path("d.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json res = r.record().at("result");
    EXPECT_EQ(res.at("tree").at("parents").size(), 2u);
    EXPECT_FALSE(res.contains("wrong_edges_ratio"));
}

TEST_F(Cli, TreeWithTruthFileAndScores) {
    ASSERT_EQ(run({"simulate", "--scenario", "sim4", "--seed", "1", "--n", "400", "--d", "3", "--out",
                   path("d.csv"), "--adjacency-out", path("adj.csv")})
                  .code,
              0);
    const auto r = run({"tree", "--data", path("d.csv"), "--truth", path("d.csv.truth.json"), "--scores-out",
                        path("scores.csv"), "--jobs", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.record().at("result").contains("wrong_edges_ratio"));
    const auto a = run({"auc", "--scores", path("scores.csv"), "--truth", path("adj.csv")});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = run({"auc", "--scores", path("scores.csv"), "--truth", path("d.csv.truth.json")});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.record().at("result").at("auc"), b.record().at("result").at("auc"));
    EXPECT_GT(a.record().at("result").at("auc").get<double>(), 0.5);
}

TEST_F(Cli, AucExamples) {
    write("adj.csv", "0,1,0\n1,0,0\n0,0,0\n");
    write("perfect.csv", "source,target,score\n0,1,5\n1,0,5\n0,2,1\n2,0,1\n1,2,0\n2,1,0\n");
    write("flat.csv", "source,target,score\n0,1,2\n1,0,2\n0,2,2\n2,0,2\n1,2,2\n2,1,2\n");
    write("short.csv", "source,target,score\n0,1,2\n1,0,2\n");
    EXPECT_EQ(run({"auc", "--scores", path("perfect.csv"), "--truth", path("adj.csv")}).record().at("result").at("auc"), 1.0);
    EXPECT_EQ(run({"auc", "--scores", path("flat.csv"), "--truth", path("adj.csv")}).record().at("result").at("auc"), 0.5);
    EXPECT_EQ(run({"auc", "--scores", path("short.csv"), "--truth", path("adj.csv")}).code, 3);
}

TEST_F(Cli, BaselinesPairAndTree) {
    ASSERT_EQ(run({"simulate", "--scenario", "gaussian_pair", "--seed", "1", "--n", "256", "--d", "1", "--rho",
                   "0.9", "--out", path("p.csv")})
                  .code,
              0);
    const auto pair = run({"baselines", "--data", path("p.csv"), "--x", "var0", "--y", "var1", "--seed", "3",
                           "--iterations", "100"});
    ASSERT_EQ(pair.code, 0) << pair.err;
    const json res = pair.record().at("result");
    EXPECT_LE(res.at("estimate").get<double>(), std::log(8.0) + 1e-9);
    EXPECT_EQ(res.at("training").at("iterations"), 100);
    const auto tree = run({"baselines", "--scenario", "sim1", "--m", "4", "--d", "2", "--n", "64", "--seed", "3",
                           "--iterations", "30", "--objective", "nwj"});
    ASSERT_EQ(tree.code, 0) << tree.err;
    EXPECT_TRUE(tree.record().at("result").contains("wrong_edges_ratio"));
}

TEST_F(Cli, SweepShapeOrderAndDeterminism) {
    const std::vector<std::string> base{"sweep", "--scenario", "sim1", "--m", "5", "--d", "2", "--sizes",
                                        "30,10", "--num-seeds", "2", "--seed", "4", "--families",
                                        "linear_gaussian,cpc:bilinear", "--iterations", "20"};
    auto serial = base, parallel = base;
    serial.insert(serial.end(), {"--jobs", "1", "--out", path("a.csv")});
    parallel.insert(parallel.end(), {"--jobs", "3", "--out", path("b.csv")});
    ASSERT_EQ(run(serial).code, 0);
    ASSERT_EQ(run(parallel).code, 0);
    std::istringstream a(slurp(path("a.csv"))), b(slurp(path("b.csv")));
    std::string la, lb;
    std::getline(a, la);
    std::getline(b, lb);
    EXPECT_EQ(la.rfind("# config: ", 0), 0u);
    const json header = json::parse(la.substr(10));
    EXPECT_EQ(header.at("command"), "sweep");
    EXPECT_EQ(header.at("config").at("seeds"), json({4, 5}));
    std::vector<std::string> rows;
    while (std::getline(a, la)) {
        std::getline(b, lb);
        EXPECT_EQ(la, lb);
        rows.push_back(la);
    }
    ASSERT_EQ(rows.size(), 9u);
    EXPECT_EQ(rows[0], "scenario,family,N,seed,wrong_edges_ratio,C_hat");
    EXPECT_EQ(rows[1].substr(0, 23), "sim1,cpc:bilinear,10,4,");
    EXPECT_EQ(rows[8].substr(0, 26), "sim1,linear_gaussian,30,5,");
}

TEST_F(Cli, SweepRatioFallsWithSampleSize) {
    const auto r = run({"sweep", "--scenario", "sim1", "--seed", "1", "--num-seeds", "10", "--out", path("s.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(path("s.csv")));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::map<int, double> mean;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto f = finfo::split_csv_line(line);
        mean[std::stoi(f[2])] += std::stod(f[4]) / 10;
        ++rows;
    }
    EXPECT_EQ(rows, 60);
    int inversions = 0;
    double prev = 2;
    for (auto [n, m] : mean) {
        inversions += m > prev;
        prev = m;
    }
    EXPECT_LE(inversions, 1);
    EXPECT_EQ(mean.at(5000), 0.0);
}

TEST_F(Cli, SweepUnknownScenario) {
    const auto r = run({"sweep", "--scenario", "sim9", "--seed", "1"});
    EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, HelpAndBadFlags) {
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"tree", "--bogus"}).code, 2);
    EXPECT_EQ(run({"simulate", "--n", "ten", "--seed", "1", "--out", path("a.csv")}).code, 2);
}
