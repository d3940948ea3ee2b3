#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "finfo/edge_weights.hpp"
#include "finfo/synth.hpp"
#include "gen.hpp"

using namespace finfo;

namespace {

Dataset cubic_dataset(std::uint64_t seed, int n = 300) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::normal_distribution<double> noise(0.0, 0.1);
    Matrix x(n, 1), y(n, 1);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = u(rng);
        y(i, 0) = std::pow(x(i, 0), 3) + noise(rng);
    }
    return Dataset{{real_samples(x), real_samples(y)}};
}

}  // namespace

TEST(EdgeWeights, MatchesPairwiseEstimates) {
    std::mt19937_64 rng(1);
    Dataset data;
    for (int v = 0; v < 4; ++v) data.variables.push_back(real_samples(gen::gaussian_matrix(rng, 50, 2)));
    data.variables[3].values += data.variables[0].values;
    const auto config = FamilyConfig::of(FamilyKind::linear_gaussian);
    const auto w = edge_weights(data, config);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            EXPECT_DOUBLE_EQ(w.w(i, j), empirical_f_information(config, data.variables[std::size_t(i)],
                                                                data.variables[std::size_t(j)])
                                            .point_estimate);
        }
    EXPECT_GT(w.w(0, 3), 10 * w.w(1, 3));
}

TEST(EdgeWeights, Asymmetric) {
    const auto data = cubic_dataset(3);
    const auto w = edge_weights(data, FamilyConfig::polynomial(3));
    EXPECT_GT(std::abs(w.w(0, 1) - w.w(1, 0)), 0.0);
    const auto lin = edge_weights(data, FamilyConfig::of(FamilyKind::linear_gaussian));
    EXPECT_GT(std::abs(lin.w(0, 1) - lin.w(1, 0)), 0.0);
}

TEST(EdgeWeights, ParallelMatchesSerial) {
    SimulationConfig config;
    config.scenario = Scenario::sim4;
    config.n = 60;
    config.d = 3;
    config.seed = 5;
    const auto data = simulate(config).first;
    const auto family = FamilyConfig::of(FamilyKind::linear_gaussian);
    const auto a = edge_weights(data, family, 1);
    const auto b = edge_weights(data, family, 4);
    EXPECT_EQ(a.w, b.w);
}

TEST(EdgeWeights, PerPairFamilies) {
    std::mt19937_64 rng(2);
    const auto x = gen::symbols(rng, 80, 3);
    Dataset data{{categorical_samples(x, 3), categorical_samples(x, 3),
                  real_samples(gen::gaussian_matrix(rng, 80, 1))}};
    const auto w = edge_weights(data, [&](int i, int j) {
        if (i < 2 && j < 2) return FamilyConfig::of(FamilyKind::tabular);
        if (j < 2) return FamilyConfig::of(FamilyKind::categorical_softmax);
        return FamilyConfig::of(FamilyKind::linear_gaussian);
    });
    EXPECT_GT(w.w(0, 1), 0.5);
    EXPECT_NEAR(w.w(0, 1), w.w(1, 0), 1e-12);
}

TEST(EdgeWeights, ErrorsPropagate) {
    Dataset one{{real_samples({1.0, 2.0})}};
    EXPECT_THROW(edge_weights(one, FamilyConfig::of(FamilyKind::linear_gaussian)), DataError);
    Dataset mixed{{real_samples({1.0, 2.0, 3.0}), categorical_samples({0, 1, 0}, 2)}};
    EXPECT_THROW(edge_weights(mixed, FamilyConfig::of(FamilyKind::tabular), 2), DataError);
}

TEST(LearnTree, RecoversSmallChain) {
    SimulationConfig config;
    config.scenario = Scenario::custom_tree;
    config.parents = {-1, 0, 1, 2};
    config.noise_variance = 0.5;
    config.d = 2;
    config.n = 500;
    config.seed = 8;
    const auto [data, truth] = simulate(config);
    const auto tree = learn_tree(data, [](int, int) { return FamilyConfig::of(FamilyKind::linear_gaussian); });
    EXPECT_DOUBLE_EQ(wrong_edges_ratio(tree, truth.tree), 0.0);
}

TEST(BaselineWeights, SymmetricAndInformative) {
    std::mt19937_64 rng(3);
    const Matrix a = gen::gaussian_matrix(rng, 160, 1);
    Dataset data{{real_samples(a), real_samples(Matrix(a + 0.3 * gen::gaussian_matrix(rng, 160, 1))),
                  real_samples(gen::gaussian_matrix(rng, 160, 1))}};
    BatchSpec spec;
    spec.iterations = 100;
    const auto w = baseline_edge_weights(data, CriticKind::bilinear, BoundObjective::cpc, spec, 2);
    EXPECT_EQ(w.w(0, 1), w.w(1, 0));
    EXPECT_GT(w.w(0, 1), w.w(0, 2));
    EXPECT_GT(w.w(0, 1), w.w(1, 2));
}
