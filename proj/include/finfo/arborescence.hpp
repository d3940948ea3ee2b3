#pragma once

// Maximum-weight spanning arborescences over a dense directed weight matrix,
// plus tree scoring helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finfo/data.hpp"
#include "finfo/error.hpp"

namespace finfo {

/// w(i, j) is the weight of the directed edge i -> j. The diagonal is unused.
struct EdgeWeightMatrix {
    Matrix w;

    int size() const noexcept { return int(w.rows()); }

    void validate() const {
        if (w.rows() != w.cols()) throw DataError("edge-weight matrix must be square");
        if (w.rows() < 2) throw DataError("edge-weight matrix needs at least 2 nodes");
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                if (i != j && !std::isfinite(w(i, j)))
                    throw DataError("non-finite edge weight " + std::to_string(i) + " -> " +
                                    std::to_string(j));
    }
};

/// Rooted directed spanning tree. parent[root] == -1.
struct Arborescence {
    int root = 0;
    std::vector<int> parent;
    double total_weight = 0.0;

    int size() const noexcept { return int(parent.size()); }

    /// Directed edges (parent, child), ordered by child.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < size(); ++i)
            if (i != root) out.emplace_back(parent[std::size_t(i)], i);
        return out;
    }
};

/// True iff `parent` encodes a spanning arborescence rooted at `root`.
inline bool is_spanning_arborescence(const std::vector<int>& parent, int root) {
    const int m = int(parent.size());
    if (root < 0 || root >= m || parent[std::size_t(root)] != -1) return false;
    for (int i = 0; i < m; ++i) {
        if (i == root) continue;
        const int p = parent[std::size_t(i)];
        if (p < 0 || p >= m || p == i) return false;
    }
    // every node reaches the root within m steps
    for (int i = 0; i < m; ++i) {
        int v = i;
        for (int steps = 0; v != root; ++steps) {
            if (steps > m) return false;
            v = parent[std::size_t(v)];
        }
    }
    return true;
}

/// Sum of w(parent(i), i), accumulated in increasing node order.
inline double tree_weight(const EdgeWeightMatrix& w, const std::vector<int>& parent) {
    double total = 0.0;
    for (std::size_t i = 0; i < parent.size(); ++i)
        if (parent[i] >= 0) total += w.w(parent[i], Eigen::Index(i));
    return total;
}

namespace detail {

struct WeightedEdge {
    int from;
    int to;
    double weight;
};

/// Chu-Liu/Edmonds for a fixed root. Returns indices into `edges` of a
/// maximum-weight arborescence, or nullopt if none spans every node.
inline std::optional<std::vector<std::size_t>> edmonds(int n, int root,
                                                        const std::vector<WeightedEdge>& edges) {
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best_in(std::size_t(n), none);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& ed = edges[e];
        if (ed.to == root || ed.from == ed.to) continue;
        auto& b = best_in[std::size_t(ed.to)];
        if (b == none || ed.weight > edges[b].weight) b = e;
    }
    for (int v = 0; v < n; ++v)
        if (v != root && best_in[std::size_t(v)] == none) return std::nullopt;

    // Cycle detection over the best-incoming graph.
    std::vector<int> comp(std::size_t(n), -1);
    std::vector<int> visited_by(std::size_t(n), -1);
    std::vector<char> in_cycle(std::size_t(n), 0);
    int components = 0;
    bool has_cycle = false;
    for (int start = 0; start < n; ++start) {
        int v = start;
        while (v != root && visited_by[std::size_t(v)] == -1 && comp[std::size_t(v)] == -1) {
            visited_by[std::size_t(v)] = start;
            v = edges[best_in[std::size_t(v)]].from;
        }
        if (v != root && comp[std::size_t(v)] == -1 && visited_by[std::size_t(v)] == start) {
            has_cycle = true;
            int u = v;
            do {
                comp[std::size_t(u)] = components;
                in_cycle[std::size_t(u)] = 1;
                u = edges[best_in[std::size_t(u)]].from;
            } while (u != v);
            ++components;
        }
    }
    if (!has_cycle) {
        std::vector<std::size_t> chosen;
        for (int v = 0; v < n; ++v)
            if (v != root) chosen.push_back(best_in[std::size_t(v)]);
        return chosen;
    }
    for (int v = 0; v < n; ++v)
        if (comp[std::size_t(v)] == -1) comp[std::size_t(v)] = components++;

    std::vector<WeightedEdge> contracted;
    std::vector<std::size_t> origin;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& ed = edges[e];
        const int cu = comp[std::size_t(ed.from)];
        const int cv = comp[std::size_t(ed.to)];
        if (cu == cv || ed.to == root) continue;
        double w = ed.weight;
        if (in_cycle[std::size_t(ed.to)]) w -= edges[best_in[std::size_t(ed.to)]].weight;
        contracted.push_back({cu, cv, w});
        origin.push_back(e);
    }
    const auto sub = edmonds(components, comp[std::size_t(root)], contracted);
    if (!sub) return std::nullopt;

    std::vector<std::size_t> chosen;
    std::vector<char> entered(std::size_t(n), 0);
    for (std::size_t k : *sub) {
        const std::size_t e = origin[k];
        chosen.push_back(e);
        entered[std::size_t(edges[e].to)] = 1;
    }
    for (int v = 0; v < n; ++v)
        if (in_cycle[std::size_t(v)] && !entered[std::size_t(v)])
            chosen.push_back(best_in[std::size_t(v)]);
    return chosen;
}

/// Best arborescence rooted at `root`, with `fixed[i] >= 0` forcing parent(i).
inline std::optional<std::vector<int>> best_parents(const EdgeWeightMatrix& w, int root,
                                                    const std::vector<int>& fixed) {
    const int m = w.size();
    std::vector<WeightedEdge> edges;
    edges.reserve(std::size_t(m * (m - 1)));
    for (int j = 0; j < m; ++j) {
        if (j == root) continue;
        for (int i = 0; i < m; ++i) {
            if (i == j) continue;
            if (fixed[std::size_t(j)] >= 0 && fixed[std::size_t(j)] != i) continue;
            edges.push_back({i, j, w.w(i, j)});
        }
    }
    const auto chosen = edmonds(m, root, edges);
    if (!chosen) return std::nullopt;
    std::vector<int> parent(std::size_t(m), -1);
    for (std::size_t e : *chosen) parent[std::size_t(edges[e].to)] = edges[e].from;
    return parent;
}

inline double tie_tolerance(const EdgeWeightMatrix& w) {
    return 1e-12 * (1.0 + w.w.cwiseAbs().sum());
}

}  // namespace detail

/// Maximum-weight spanning arborescence over every choice of root.
/// Ties are broken towards the lexicographically smallest (root, parent map).
inline Arborescence max_arborescence(const EdgeWeightMatrix& w) {
    w.validate();
    const int m = w.size();
    const double tol = detail::tie_tolerance(w);
    const std::vector<int> free(std::size_t(m), -1);

    std::vector<double> per_root(std::size_t(m), -std::numeric_limits<double>::infinity());
    std::vector<std::vector<int>> trees(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
        auto parent = detail::best_parents(w, r, free);
        if (!parent) throw DataError("no spanning arborescence exists");
        per_root[std::size_t(r)] = tree_weight(w, *parent);
        trees[std::size_t(r)] = std::move(*parent);
    }
    const double best = *std::max_element(per_root.begin(), per_root.end());
    int root = 0;
    while (per_root[std::size_t(root)] < best - tol) ++root;

    // Lexicographic refinement: fix each node's parent to the smallest index
    // that still admits an optimal tree.
    std::vector<int> fixed = free;
    std::vector<int> parent = trees[std::size_t(root)];
    const double target = per_root[std::size_t(root)];
    for (int i = 0; i < m; ++i) {
        if (i == root) continue;
        for (int p = 0; p < m; ++p) {
            if (p == i) continue;
            if (p == parent[std::size_t(i)]) {
                fixed[std::size_t(i)] = p;
                break;
            }
            fixed[std::size_t(i)] = p;
            const auto candidate = detail::best_parents(w, root, fixed);
            if (candidate && tree_weight(w, *candidate) >= target - tol) {
                parent = *candidate;
                break;
            }
            fixed[std::size_t(i)] = -1;
        }
    }
    return {root, parent, tree_weight(w, parent)};
}

/// Exhaustive search over all m^(m-1) rooted trees. m <= 8.
/// Returns the lexicographically first (root, parent map) among the maxima.
inline Arborescence brute_force_arborescence(const EdgeWeightMatrix& w) {
    w.validate();
    const int m = w.size();
    if (m > 8) throw UsageError("brute-force arborescence supports at most 8 nodes");
    Arborescence best;
    bool found = false;
    for (int root = 0; root < m; ++root) {
        std::vector<int> parent(std::size_t(m), 0);
        parent[std::size_t(root)] = -1;
        std::vector<int> nodes;
        for (int i = 0; i < m; ++i)
            if (i != root) nodes.push_back(i);
        // Odometer over parent choices; each non-root node ranges over the
        // other m-1 indices in increasing order.
        auto first_choice = [](int node) { return node == 0 ? 1 : 0; };
        auto next_choice = [&](int node, int p) {
            ++p;
            if (p == node) ++p;
            return p;
        };
        for (int node : nodes) parent[std::size_t(node)] = first_choice(node);
        while (true) {
            if (is_spanning_arborescence(parent, root)) {
                const double total = tree_weight(w, parent);
                if (!found || total > best.total_weight) {
                    best = {root, parent, total};
                    found = true;
                }
            }
            // increment, last node fastest so enumeration is lexicographic
            int k = int(nodes.size()) - 1;
            for (; k >= 0; --k) {
                const int node = nodes[std::size_t(k)];
                const int p = next_choice(node, parent[std::size_t(node)]);
                if (p < m) {
                    parent[std::size_t(node)] = p;
                    break;
                }
                parent[std::size_t(node)] = first_choice(node);
            }
            if (k < 0) break;
        }
    }
    return best;
}

enum class EdgeComparison { undirected, directed };

/// Fraction of the found tree's m-1 edges that are absent from the truth.
inline double wrong_edges_ratio(const Arborescence& found, const Arborescence& truth,
                                EdgeComparison mode = EdgeComparison::undirected) {
    if (found.size() != truth.size())
        throw DataError("trees have different node counts (" + std::to_string(found.size()) +
                        " vs " + std::to_string(truth.size()) + ")");
    if (found.size() < 2) throw DataError("trees need at least 2 nodes");
    std::set<std::pair<int, int>> reference;
    for (auto [p, c] : truth.edges())
        reference.insert(mode == EdgeComparison::undirected ? std::pair<int, int>(std::minmax(p, c))
                                                            : std::pair{p, c});
    int wrong = 0;
    for (auto [p, c] : found.edges()) {
        const std::pair<int, int> key = mode == EdgeComparison::undirected
                                            ? std::pair<int, int>(std::minmax(p, c))
                                            : std::pair{p, c};
        if (!reference.contains(key)) ++wrong;
    }
    return double(wrong) / double(found.size() - 1);
}

/// Sample sizes entering one directed edge's estimate: |D_j| (target only)
/// and |D_ij| (pairs).
struct EdgeSampleSizes {
    double target = 0;
    double pair = 0;
};

/// Worst-case shortfall of the learned tree's total weight against the
/// optimum: 2(m-1) max_e { rademacher + B sqrt(2 log(1/delta)) (|D_j|^-1/2 + |D_ij|^-1/2) },
/// where `rademacher` bounds 2R_ij + 2R_j over all edges.
inline double theorem2_gap(double rademacher, double B, double delta,
                           const std::vector<EdgeSampleSizes>& sizes, int m) {
    if (m < 2) throw UsageError("need m >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
    if (rademacher < 0 || !(B > 0)) throw UsageError("need Rademacher term >= 0 and B > 0");
    if (sizes.empty()) throw UsageError("need at least one edge's sample sizes");
    const double scale = B * std::sqrt(2.0 * std::log(1.0 / delta));
    double worst = 0.0;
    for (const auto& s : sizes) {
        if (!(s.target > 0 && s.pair > 0)) throw UsageError("sample sizes must be positive");
        worst = std::max(worst, rademacher + scale * (1.0 / std::sqrt(s.target) +
                                                      1.0 / std::sqrt(s.pair)));
    }
    return 2.0 * (m - 1) * worst;
}

/// Probability with which the gap holds: 1 - 2m(m-1)delta (may be vacuous).
inline double theorem2_confidence(int m, double delta) {
    return 1.0 - 2.0 * m * (m - 1) * delta;
}

}  // namespace finfo
