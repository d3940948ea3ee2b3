#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "finfo/arborescence.hpp"
#include "finfo/baselines.hpp"
#include "finfo/data.hpp"
#include "finfo/estimation.hpp"
#include "finfo/families.hpp"

namespace finfo {

/// Picks the predictive family for the directed pair (i -> j).
using FamilySelector = std::function<FamilyConfig(int, int)>;

/// Estimator for one directed pair: (source samples, target samples) -> weight.
using PairEstimator = std::function<double(const Samples&, const Samples&)>;

namespace detail {

/// Runs task(k) for k in [0, count) on up to `jobs` threads. Each task writes
/// only its own slot, so the result does not depend on scheduling.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) task(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    task(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// w(i, j) = estimator(X_i, X_j) for every ordered pair. With `symmetric`, each
/// unordered pair is estimated once (as i < j) and mirrored.
inline EdgeWeightMatrix pairwise_weights(const Dataset& data, const PairEstimator& estimator,
                                         int jobs = 1, bool symmetric = false) {
    validate(data);
    const int m = int(data.variable_count());
    if (m < 2) throw DataError("edge weights need at least 2 variables");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && (!symmetric || i < j)) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    detail::parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        values[k] = estimator(data.variables[std::size_t(i)], data.variables[std::size_t(j)]);
    });
    EdgeWeightMatrix w{Matrix::Zero(m, m)};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        w.w(i, j) = values[k];
        if (symmetric) w.w(j, i) = values[k];
    }
    w.validate();
    return w;
}

/// Directed edge weights w(i, j) = empirical F-information I(X_i -> X_j)
/// under family_for(i, j).
inline EdgeWeightMatrix edge_weights(const Dataset& data, const FamilySelector& family_for,
                                     int jobs = 1) {
    validate(data);
    const int m = int(data.variable_count());
    if (m < 2) throw DataError("edge weights need at least 2 variables");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    detail::parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        values[k] = empirical_f_information(family_for(i, j), data.variables[std::size_t(i)],
                                            data.variables[std::size_t(j)])
                        .point_estimate;
    });
    EdgeWeightMatrix w{Matrix::Zero(m, m)};
    for (std::size_t k = 0; k < pairs.size(); ++k) w.w(pairs[k].first, pairs[k].second) = values[k];
    w.validate();
    return w;
}

inline EdgeWeightMatrix edge_weights(const Dataset& data, const FamilyConfig& family, int jobs = 1) {
    return edge_weights(data, [&](int, int) { return family; }, jobs);
}

/// Symmetric MI-proxy weights from a fitted variational critic (the
/// classic undirected Chow-Liu baseline).
inline EdgeWeightMatrix baseline_edge_weights(const Dataset& data, CriticKind kind,
                                              BoundObjective objective, const BatchSpec& spec,
                                              int jobs = 1) {
    return pairwise_weights(
        data,
        [&](const Samples& a, const Samples& b) {
            return baseline_mutual_information(kind, objective, a.values, b.values, spec);
        },
        jobs, true);
}

/// Edge weights followed by the maximum spanning arborescence.
inline Arborescence learn_tree(const Dataset& data, const FamilySelector& family_for, int jobs = 1) {
    return max_arborescence(edge_weights(data, family_for, jobs));
}

}  // namespace finfo
