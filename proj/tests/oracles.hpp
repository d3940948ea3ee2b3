#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's fitting code.

#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Plug-in Shannon mutual information (nats) of the empirical joint.
inline double plugin_mutual_information(const std::vector<int>& xs, const std::vector<int>& ys) {
    const double n = double(xs.size());
    std::map<int, double> px, py;
    std::map<std::pair<int, int>, double> pxy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        px[xs[i]] += 1;
        py[ys[i]] += 1;
        pxy[{xs[i], ys[i]}] += 1;
    }
    double mi = 0.0;
    for (const auto& [key, c] : pxy) {
        const double p = c / n;
        mi += p * std::log(p / ((px[key.first] / n) * (py[key.second] / n)));
    }
    return mi;
}

/// Plug-in Shannon entropy (nats).
inline double plugin_entropy(const std::vector<int>& ys) {
    std::map<int, double> counts;
    for (int y : ys) counts[y] += 1;
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = c / double(ys.size());
        h -= p * std::log(p);
    }
    return h;
}

/// Plug-in conditional entropy H(Y|X) (nats).
inline double plugin_conditional_entropy(const std::vector<int>& xs, const std::vector<int>& ys) {
    return plugin_entropy(ys) - plugin_mutual_information(xs, ys);
}

/// Solves A z = b by Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = 0; c < n; ++c) b[c] /= a[c][c];
    return b;
}

/// R^2 * tr(Cov(Y)) (biased covariance) of the least-squares regression of
/// each target column on [x, 1], by normal equations.
/// rows: x (dx values) then y (dy values).
inline double explained_variance(const std::vector<std::vector<double>>& x,
                                 const std::vector<std::vector<double>>& y) {
    const std::size_t n = x.size(), dx = x[0].size(), dy = y[0].size();
    const std::size_t p = dx + 1;
    std::vector<std::vector<double>> gram(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                gram[a][b] += (a < dx ? x[i][a] : 1.0) * (b < dx ? x[i][b] : 1.0);
    double explained = 0.0;
    for (std::size_t t = 0; t < dy; ++t) {
        std::vector<double> rhs(p, 0.0);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t a = 0; a < p; ++a) rhs[a] += (a < dx ? x[i][a] : 1.0) * y[i][t];
            mean += y[i][t];
        }
        mean /= double(n);
        const auto beta = solve(gram, rhs);
        double sst = 0.0, sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = beta[dx];
            for (std::size_t a = 0; a < dx; ++a) pred += beta[a] * x[i][a];
            sse += (y[i][t] - pred) * (y[i][t] - pred);
            sst += (y[i][t] - mean) * (y[i][t] - mean);
        }
        explained += (sst - sse) / double(n);  // R^2_t * Var(y_t)
    }
    return explained;
}

/// Geometric median of 2-D points by coarse-to-fine grid search.
inline std::pair<double, double> grid_geometric_median(const std::vector<std::pair<double, double>>& pts) {
    auto cost = [&](double a, double b) {
        double s = 0.0;
        for (auto [x, y] : pts) s += std::hypot(x - a, y - b);
        return s;
    };
    double cx = 0, cy = 0;
    for (auto [x, y] : pts) {
        cx += x;
        cy += y;
    }
    cx /= double(pts.size());
    cy /= double(pts.size());
    double span = 4.0;
    for (int level = 0; level < 40; ++level) {
        double best = cost(cx, cy), bx = cx, by = cy;
        const int steps = 20;
        for (int i = -steps; i <= steps; ++i)
            for (int j = -steps; j <= steps; ++j) {
                const double a = cx + span * i / steps, b = cy + span * j / steps;
                const double c = cost(a, b);
                if (c < best) {
                    best = c;
                    bx = a;
                    by = b;
                }
            }
        cx = bx;
        cy = by;
        span /= 4.0;
    }
    return {cx, cy};
}

/// 1-D trapezoid quadrature.
template <typename F>
double integrate(F f, double lo, double hi, int steps) {
    const double h = (hi - lo) / steps;
    double s = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < steps; ++i) s += f(lo + i * h);
    return s * h;
}

}  // namespace oracle
