#pragma once

// Synthetic tree-structured datasets with known generative structure.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "finfo/arborescence.hpp"
#include "finfo/data.hpp"
#include "finfo/error.hpp"

namespace finfo {

enum class Scenario { sim1, sim2, sim3, sim4, sim5, sim6, gaussian_pair, custom_tree };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::sim1: return "sim1";
        case Scenario::sim2: return "sim2";
        case Scenario::sim3: return "sim3";
        case Scenario::sim4: return "sim4";
        case Scenario::sim5: return "sim5";
        case Scenario::sim6: return "sim6";
        case Scenario::gaussian_pair: return "gaussian_pair";
        case Scenario::custom_tree: return "custom_tree";
    }
    return "unknown";
}

inline Scenario parse_scenario(const std::string& s) {
    for (auto k : {Scenario::sim1, Scenario::sim2, Scenario::sim3, Scenario::sim4, Scenario::sim5,
                   Scenario::sim6, Scenario::gaussian_pair, Scenario::custom_tree})
        if (to_string(k) == s) return k;
    throw UsageError("unknown scenario '" + s + "'");
}

/// How E(v) reads its parameter: as a rate (mean 1/v) or as a mean.
enum class ExponentialParam { rate, mean };

struct SimulationConfig {
    Scenario scenario = Scenario::sim1;
    int m = 0;  // 0: scenario default (20 for star sims, 7 for depth-2 sims, 2 for pairs)
    int d = 10;
    Eigen::Index n = 1000;
    std::uint64_t seed = 0;
    ExponentialParam exponential = ExponentialParam::rate;
    double exponential_noise_rate = 0.1;  // epsilon ~ E(rate)
    double rho = 0.8;                     // gaussian_pair
    double var_y = 1.0;                   // gaussian_pair
    std::vector<int> parents;             // custom_tree, parent[root] == -1
    double noise_variance = 6.0;          // custom_tree

    int node_count() const {
        if (m > 0) return m;
        switch (scenario) {
            case Scenario::sim1:
            case Scenario::sim2:
            case Scenario::sim3: return 20;
            case Scenario::sim4:
            case Scenario::sim5:
            case Scenario::sim6: return 7;
            case Scenario::gaussian_pair: return 2;
            case Scenario::custom_tree: return int(parents.size());
        }
        return 0;
    }

    void validate() const {
        const int nodes = node_count();
        if (d < 1) throw UsageError("dimension d must be >= 1");
        if (n < 1) throw UsageError("sample count must be >= 1");
        switch (scenario) {
            case Scenario::sim1:
            case Scenario::sim2:
            case Scenario::sim3:
                if (nodes < 2) throw UsageError("star scenarios need m >= 2");
                break;
            case Scenario::sim4:
            case Scenario::sim5:
            case Scenario::sim6:
                if (nodes < 3) throw UsageError("depth-2 scenarios need m >= 3");
                break;
            case Scenario::gaussian_pair:
                if (nodes != 2) throw UsageError("gaussian_pair has exactly 2 variables");
                if (!(std::abs(rho) < 1.0)) throw UsageError("gaussian_pair needs |rho| < 1");
                if (!(var_y > 0)) throw UsageError("gaussian_pair needs var_y > 0");
                break;
            case Scenario::custom_tree: {
                if (nodes < 2) throw UsageError("custom_tree needs at least 2 parents entries");
                if (m > 0 && m != int(parents.size()))
                    throw UsageError("custom_tree m disagrees with the parent list");
                int root = -1;
                for (int i = 0; i < nodes; ++i)
                    if (parents[std::size_t(i)] == -1) root = i;
                if (root < 0 || !is_spanning_arborescence(parents, root))
                    throw UsageError("custom_tree parents do not form a rooted spanning tree");
                if (!(noise_variance > 0)) throw UsageError("noise variance must be > 0");
                break;
            }
        }
        if (!(exponential_noise_rate > 0)) throw UsageError("exponential noise rate must be > 0");
    }
};

/// Conditional law of a child given its parent.
enum class EdgeLaw { root_uniform, gaussian, exponential, mixed_exponential, mixture };

inline std::string to_string(EdgeLaw l) {
    switch (l) {
        case EdgeLaw::root_uniform: return "uniform(0,10)";
        case EdgeLaw::gaussian: return "gaussian";
        case EdgeLaw::exponential: return "exponential";
        case EdgeLaw::mixed_exponential: return "mixed_exponential";
        case EdgeLaw::mixture: return "mixture";
    }
    return "unknown";
}

struct GroundTruth {
    Arborescence tree;
    std::vector<EdgeLaw> law;              // per node
    std::vector<Matrix> mixing;            // per node; empty when unused
    std::vector<double> noise_variance;    // per node; Gaussian component variance or 0
};

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the signs of R's diagonal folded into Q.
inline Matrix random_orthogonal(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

/// Population F-information (linear-Gaussian family, covariance ½I) of a
/// scalar Gaussian pair with correlation rho: rho^2 * var_y.
inline double analytic_f_information_gaussian_pair(double rho, double var_y) {
    if (!(std::abs(rho) < 1.0)) throw UsageError("need |rho| < 1");
    if (!(var_y > 0)) throw UsageError("need var_y > 0");
    return rho * rho * var_y;
}

namespace detail {

inline std::vector<int> scenario_parents(const SimulationConfig& c) {
    const int m = c.node_count();
    std::vector<int> parent(std::size_t(m), 0);
    parent[0] = -1;
    switch (c.scenario) {
        case Scenario::sim4:
        case Scenario::sim5:
        case Scenario::sim6:
            // 0 -> {1, 2}; later nodes attach in pairs to 1, then 2, alternating
            for (int k = 3; k < m; ++k) parent[std::size_t(k)] = 1 + ((k - 3) / 2) % 2;
            break;
        case Scenario::custom_tree: return c.parents;
        default: break;
    }
    return parent;
}

inline EdgeLaw scenario_law(Scenario s, bool child_of_root) {
    switch (s) {
        case Scenario::sim1:
        case Scenario::sim4: return EdgeLaw::gaussian;
        case Scenario::sim2: return EdgeLaw::mixed_exponential;
        case Scenario::sim3: return EdgeLaw::mixture;
        case Scenario::sim5: return child_of_root ? EdgeLaw::exponential : EdgeLaw::mixed_exponential;
        case Scenario::sim6: return child_of_root ? EdgeLaw::mixed_exponential : EdgeLaw::gaussian;
        case Scenario::gaussian_pair:
        case Scenario::custom_tree: return EdgeLaw::gaussian;
    }
    return EdgeLaw::gaussian;
}

inline double scenario_noise(const SimulationConfig& c) {
    switch (c.scenario) {
        case Scenario::sim1:
        case Scenario::sim3: return 6.0;
        case Scenario::sim4:
        case Scenario::sim5:
        case Scenario::sim6: return 2.0;
        case Scenario::custom_tree: return c.noise_variance;
        default: return 0.0;
    }
}

}  // namespace detail

/// Draws N samples of every variable plus the generative ground truth.
/// Deterministic given the config (including seed).
inline std::pair<Dataset, GroundTruth> simulate(const SimulationConfig& config) {
    config.validate();
    const int m = config.node_count();
    const int d = config.d;
    const Eigen::Index n = config.n;
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 10.0);
    std::exponential_distribution<double> eps_dist(config.exponential_noise_rate);
    std::bernoulli_distribution coin(0.5);

    Dataset data;
    data.variables.assign(std::size_t(m), Samples{VariableSpec::real(d), Matrix(n, d)});
    GroundTruth truth;

    if (config.scenario == Scenario::gaussian_pair) {
        truth.tree = {0, {-1, 0}, 0.0};
        truth.law = {EdgeLaw::gaussian, EdgeLaw::gaussian};
        truth.mixing.assign(2, Matrix());
        const double slope = config.rho * std::sqrt(config.var_y);
        const double resid = config.var_y * (1.0 - config.rho * config.rho);
        truth.noise_variance = {1.0, resid};
        for (Eigen::Index i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) {
                const double x = normal(rng);
                data.variables[0].values(i, k) = x;
                data.variables[1].values(i, k) = slope * x + std::sqrt(resid) * normal(rng);
            }
        return {std::move(data), std::move(truth)};
    }

    const std::vector<int> parent = detail::scenario_parents(config);
    int root = 0;
    for (int i = 0; i < m; ++i)
        if (parent[std::size_t(i)] == -1) root = i;
    truth.tree = {root, parent, 0.0};
    truth.law.assign(std::size_t(m), EdgeLaw::root_uniform);
    truth.mixing.assign(std::size_t(m), Matrix());
    truth.noise_variance.assign(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) {
        if (i == root) continue;
        const EdgeLaw law = detail::scenario_law(config.scenario, parent[std::size_t(i)] == root);
        truth.law[std::size_t(i)] = law;
        if (law != EdgeLaw::exponential) truth.mixing[std::size_t(i)] = random_orthogonal(d, rng);
        if (law == EdgeLaw::gaussian || law == EdgeLaw::mixture)
            truth.noise_variance[std::size_t(i)] = detail::scenario_noise(config);
    }

    // Topological order: parents before children.
    std::vector<int> order{root};
    for (std::size_t k = 0; k < order.size(); ++k)
        for (int i = 0; i < m; ++i)
            if (parent[std::size_t(i)] == order[k]) order.push_back(i);

    Vector e(d);
    for (Eigen::Index s = 0; s < n; ++s) {
        for (int node : order) {
            auto row = data.variables[std::size_t(node)].values.row(s);
            if (node == root) {
                for (int k = 0; k < d; ++k) row(k) = uniform(rng);
                continue;
            }
            const auto parent_row = data.variables[std::size_t(parent[std::size_t(node)])].values.row(s);
            const Matrix& w = truth.mixing[std::size_t(node)];
            EdgeLaw law = truth.law[std::size_t(node)];
            if (law == EdgeLaw::mixture)
                law = coin(rng) ? EdgeLaw::gaussian : EdgeLaw::mixed_exponential;
            if (law == EdgeLaw::gaussian) {
                const double sd = std::sqrt(truth.noise_variance[std::size_t(node)]);
                Vector noise(d);
                for (int k = 0; k < d; ++k) noise(k) = sd * normal(rng);
                row = (w * parent_row.transpose() + noise).transpose();
                continue;
            }
            for (int k = 0; k < d; ++k) {
                const double param = parent_row(k) + eps_dist(rng);
                const double rate =
                    config.exponential == ExponentialParam::rate ? param : 1.0 / param;
                if (!(rate > 0) || !std::isfinite(rate))
                    throw NumericalError("exponential parameter must be positive, got " +
                                         std::to_string(param));
                e(k) = std::exponential_distribution<double>(rate)(rng);
            }
            if (law == EdgeLaw::exponential) row = e.transpose();
            else row = (w * e).transpose();
        }
    }
    return {std::move(data), std::move(truth)};
}

}  // namespace finfo
