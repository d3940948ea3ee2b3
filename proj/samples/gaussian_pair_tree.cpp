// Estimates F-information on a correlated Gaussian pair, then learns a tree
// on a small star-shaped simulation.

#include <cstdio>

#include "finfo/finfo.hpp"

int main() {
    using namespace finfo;

    SimulationConfig pair;
    pair.scenario = Scenario::gaussian_pair;
    pair.d = 1;
    pair.n = 2000;
    pair.rho = 0.8;
    pair.seed = 1;
    const auto [data, truth] = simulate(pair);
    const auto linear = FamilyConfig::of(FamilyKind::linear_gaussian);
    const auto est = empirical_f_information(linear, data.variables[0], data.variables[1]);
    std::printf("I(X -> Y) = %.4f nats (population %.4f)\n", est.point_estimate,
                analytic_f_information_gaussian_pair(pair.rho, pair.var_y));

    SimulationConfig star;
    star.scenario = Scenario::sim1;
    star.m = 8;
    star.n = 300;
    star.seed = 2;
    const auto [star_data, star_truth] = simulate(star);
    const Arborescence tree = learn_tree(star_data, [&](int, int) { return linear; });
    std::printf("root %d, wrong-edges ratio %.3f\n", tree.root,
                wrong_edges_ratio(tree, star_truth.tree));
    for (auto [p, c] : tree.edges()) std::printf("  %d -> %d\n", p, c);
}
