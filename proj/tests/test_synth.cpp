#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "finfo/estimation.hpp"
#include "finfo/synth.hpp"

using namespace finfo;

namespace {

SimulationConfig config_for(Scenario s, std::uint64_t seed, Eigen::Index n = 200) {
    SimulationConfig c;
    c.scenario = s;
    c.seed = seed;
    c.n = n;
    return c;
}

double correlation(const Vector& a, const Vector& b) {
    const Vector ca = a.array() - a.mean(), cb = b.array() - b.mean();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

}  // namespace

TEST(Simulate, Sim1Shape) {
    const auto [data, truth] = simulate(config_for(Scenario::sim1, 7, 500));
    ASSERT_EQ(data.variable_count(), 20u);
    for (const auto& v : data.variables) {
        EXPECT_EQ(v.values.rows(), 500);
        EXPECT_EQ(v.values.cols(), 10);
    }
    EXPECT_EQ(truth.tree.root, 0);
    for (int i = 1; i < 20; ++i) EXPECT_EQ(truth.tree.parent[std::size_t(i)], 0);
    // U(0,10) coordinates: mean 5, sd 10/sqrt(12)
    const double mean = data.variables[0].values.mean();
    const double se = 10.0 / std::sqrt(12.0) / std::sqrt(500.0 * 10);
    EXPECT_LE(std::abs(mean - 5.0), 3 * se);
}

TEST(Simulate, Reproducible) {
    for (auto s : {Scenario::sim1, Scenario::sim2, Scenario::sim3, Scenario::sim4, Scenario::sim5,
                   Scenario::sim6, Scenario::gaussian_pair}) {
        const auto a = simulate(config_for(s, 3, 50)).first;
        const auto b = simulate(config_for(s, 3, 50)).first;
        const auto c = simulate(config_for(s, 4, 50)).first;
        ASSERT_EQ(a.variable_count(), b.variable_count());
        for (std::size_t v = 0; v < a.variable_count(); ++v) {
            EXPECT_EQ(a.variables[v].values, b.variables[v].values) << to_string(s);
            EXPECT_TRUE(a.variables[v].values.allFinite());
        }
        EXPECT_NE(a.variables.back().values, c.variables.back().values);
    }
}

TEST(Simulate, MixingMatricesOrthogonal) {
    for (auto s : {Scenario::sim1, Scenario::sim2, Scenario::sim3, Scenario::sim4, Scenario::sim5,
                   Scenario::sim6}) {
        const auto truth = simulate(config_for(s, 11, 5)).second;
        for (std::size_t i = 0; i < truth.mixing.size(); ++i) {
            const Matrix& w = truth.mixing[i];
            if (w.size() == 0) continue;
            EXPECT_LE((w.transpose() * w - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(Simulate, Sim5RootChildrenHaveNoMixing) {
    const auto [data, truth] = simulate(config_for(Scenario::sim5, 2, 100));
    for (int i = 0; i < 7; ++i) {
        if (truth.tree.parent[std::size_t(i)] != 0) continue;
        EXPECT_EQ(truth.mixing[std::size_t(i)].size(), 0);
        EXPECT_GT(data.variables[std::size_t(i)].values.minCoeff(), 0.0);  // exponential draws
    }
}

TEST(Simulate, DepthTwoLayout) {
    const auto truth = simulate(config_for(Scenario::sim4, 1, 5)).second;
    EXPECT_EQ(truth.tree.parent, (std::vector<int>{-1, 0, 0, 1, 1, 2, 2}));
}

TEST(Simulate, GaussianPairCorrelation) {
    auto c = config_for(Scenario::gaussian_pair, 5, 4000);
    c.d = 1;
    c.rho = 0.8;
    const auto data = simulate(c).first;
    const double r = correlation(data.variables[0].values.col(0), data.variables[1].values.col(0));
    EXPECT_LE(std::abs(r - 0.8), 3 * (1 - 0.64) / std::sqrt(4000.0));
}

TEST(Simulate, Sim4ConditionalIndependence) {
    // node 3's parent is 1, whose parent is 0; given node 1, node 3 and node 0
    // are independent. Check the partial correlation of one coordinate pair
    // after regressing both on all of node 1.
    const auto data = simulate(config_for(Scenario::sim4, 13, 20000)).first;
    const Matrix& given = data.variables[1].values;
    Matrix design(given.rows(), given.cols() + 1);
    design << given, Vector::Ones(given.rows());
    auto residual = [&](const Vector& v) -> Vector {
        const Vector beta = design.colPivHouseholderQr().solve(v);
        return v - design * beta;
    };
    const double r = correlation(residual(data.variables[3].values.col(0)),
                                 residual(data.variables[0].values.col(0)));
    EXPECT_LE(std::abs(r), 3.0 / std::sqrt(20000.0));
}

TEST(Simulate, ExponentialMeanReading) {
    auto c = config_for(Scenario::sim5, 3, 2000);
    c.exponential = ExponentialParam::mean;
    const auto [data, truth] = simulate(c);
    // root child: E(mean = x + eps), so E[y] = E[x] + 10 = 15
    int child = 1;
    EXPECT_NEAR(data.variables[std::size_t(child)].values.mean(), 15.0, 1.0);
    c.exponential = ExponentialParam::rate;
    const auto rate_data = simulate(c).first;
    EXPECT_LT(rate_data.variables[std::size_t(child)].values.mean(), 1.0);
}

TEST(Analytic, GaussianPair) {
    EXPECT_DOUBLE_EQ(analytic_f_information_gaussian_pair(0.0, 2.0), 0.0);
    EXPECT_NEAR(analytic_f_information_gaussian_pair(0.999999, 3.0), 3.0, 1e-5);
    EXPECT_NEAR(analytic_f_information_gaussian_pair(0.8, 1.0), 0.64, 1e-15);
    EXPECT_THROW(analytic_f_information_gaussian_pair(1.0, 1.0), UsageError);
}

TEST(Analytic, MonteCarloCrossCheck) {
    auto c = config_for(Scenario::gaussian_pair, 17, 100000);
    c.d = 1;
    c.rho = 0.8;
    const auto data = simulate(c).first;
    const double est = empirical_f_information(FamilyConfig::of(FamilyKind::linear_gaussian),
                                               data.variables[0], data.variables[1])
                           .point_estimate;
    EXPECT_NEAR(est, 0.64, 0.01);
}

TEST(Config, Validation) {
    auto c = config_for(Scenario::custom_tree, 1);
    c.parents = {-1, 2, 1};
    EXPECT_THROW(simulate(c), UsageError);
    c = config_for(Scenario::gaussian_pair, 1);
    c.rho = 1.0;
    EXPECT_THROW(simulate(c), UsageError);
    EXPECT_THROW(parse_scenario("sim9"), UsageError);
    c = config_for(Scenario::sim1, 1);
    c.d = 0;
    EXPECT_THROW(simulate(c), UsageError);
}

TEST(Orthogonal, HaarDiagnostics) {
    std::mt19937_64 rng(3);
    double trace_sum = 0;
    for (int k = 0; k < 2000; ++k) {
        const Matrix q = random_orthogonal(4, rng);
        EXPECT_LE((q.transpose() * q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
        trace_sum += q.trace();
    }
    // Haar: E[tr Q] = 0 with variance 1
    EXPECT_LE(std::abs(trace_sum / 2000), 3.0 / std::sqrt(2000.0));
}
