#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "finfo/data.hpp"
#include "finfo/error.hpp"

namespace finfo {

/// ROC AUC via the Mann-Whitney rank statistic; tied scores receive their
/// average rank, so all-equal scores give exactly 0.5.
inline double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw DataError("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (bool p : positive) pos += p ? 1 : 0;
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw DataError("AUC needs both positive and negative labels");
    for (double s : scores)
        if (!std::isfinite(s)) throw DataError("non-finite score");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * double(i + j) + 1.0;  // ranks are 1-based
        for (std::size_t k = i; k <= j; ++k)
            if (positive[order[k]]) rank_sum += avg_rank;
        i = j + 1;
    }
    const double u = rank_sum - double(pos) * double(pos + 1) / 2.0;
    return u / (double(pos) * double(neg));
}

/// AUC over all ordered pairs i != j of a score matrix against a 0/1
/// adjacency matrix.
inline double edge_auc(const Matrix& scores, const Matrix& truth) {
    if (scores.rows() != scores.cols() || truth.rows() != truth.cols() ||
        scores.rows() != truth.rows())
        throw DataError("score and truth matrices must be square and the same size");
    std::vector<double> s;
    std::vector<bool> t;
    for (Eigen::Index i = 0; i < scores.rows(); ++i)
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            if (i == j) continue;
            if (truth(i, j) != 0.0 && truth(i, j) != 1.0)
                throw DataError("truth adjacency must be binary");
            s.push_back(scores(i, j));
            t.push_back(truth(i, j) == 1.0);
        }
    return roc_auc(s, t);
}

}  // namespace finfo
