#pragma once

// Variational Shannon-MI baselines: the contrastive (CPC / InfoNCE) and NWJ
// lower bounds with critics that are linear in their parameters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "finfo/data.hpp"
#include "finfo/error.hpp"
#include "finfo/families.hpp"

namespace finfo {

enum class CriticKind { bilinear, quadratic, gaussian_oracle };
enum class BoundObjective { cpc, nwj };

inline std::string to_string(CriticKind k) {
    switch (k) {
        case CriticKind::bilinear: return "bilinear";
        case CriticKind::quadratic: return "quadratic";
        case CriticKind::gaussian_oracle: return "gaussian_oracle";
    }
    return "unknown";
}
inline std::string to_string(BoundObjective o) { return o == BoundObjective::cpc ? "cpc" : "nwj"; }

inline CriticKind parse_critic_kind(const std::string& s) {
    for (auto k : {CriticKind::bilinear, CriticKind::quadratic, CriticKind::gaussian_oracle})
        if (to_string(k) == s) return k;
    throw UsageError("unknown critic '" + s + "'");
}
inline BoundObjective parse_objective(const std::string& s) {
    if (s == "cpc") return BoundObjective::cpc;
    if (s == "nwj") return BoundObjective::nwj;
    throw UsageError("unknown objective '" + s + "'");
}

/// Score function f(x, y). Trainable kinds are linear in their parameters:
/// bilinear  x'Ay + a'x + b'y + c;
/// quadratic every monomial of degree <= 2 in (x, y).
/// gaussian_oracle is offset + log p(x,y)/(p(x)p(y)) for coordinate-wise
/// standard bivariate Gaussians with correlation rho.
class Critic {
public:
    static Critic bilinear(int dx, int dy) {
        return {CriticKind::bilinear, dx, dy, Vector::Zero(dx * dy + dx + dy + 1)};
    }
    static Critic quadratic(int dx, int dy) {
        const int d = dx + dy;
        return {CriticKind::quadratic, dx, dy, Vector::Zero(1 + d + d * (d + 1) / 2)};
    }
    static Critic gaussian_oracle(double rho, double offset, int dims = 1) {
        if (!(std::abs(rho) < 1.0)) throw UsageError("oracle critic needs |rho| < 1");
        Vector p(2);
        p << rho, offset;
        return {CriticKind::gaussian_oracle, dims, dims, p};
    }
    static Critic make(CriticKind kind, int dx, int dy) {
        switch (kind) {
            case CriticKind::bilinear: return bilinear(dx, dy);
            case CriticKind::quadratic: return quadratic(dx, dy);
            case CriticKind::gaussian_oracle: break;
        }
        throw UsageError("the oracle critic is not trainable");
    }

    CriticKind kind() const noexcept { return kind_; }
    int x_dim() const noexcept { return dx_; }
    int y_dim() const noexcept { return dy_; }
    const Vector& parameters() const noexcept { return params_; }
    Vector& parameters() noexcept { return params_; }
    double cap() const noexcept { return cap_; }
    void set_cap(double cap) {
        if (!(cap > 0)) throw UsageError("critic cap must be > 0");
        cap_ = cap;
    }

    /// Feature vector phi(x, y) with f = parameters . phi (trainable kinds).
    Vector features(Eigen::Ref<const RowVector> x, Eigen::Ref<const RowVector> y) const {
        check_shapes(x, y);
        if (kind_ == CriticKind::bilinear) {
            Vector phi(params_.size());
            Eigen::Index k = 0;
            for (int i = 0; i < dx_; ++i)
                for (int j = 0; j < dy_; ++j) phi(k++) = x(i) * y(j);
            for (int i = 0; i < dx_; ++i) phi(k++) = x(i);
            for (int j = 0; j < dy_; ++j) phi(k++) = y(j);
            phi(k) = 1.0;
            return phi;
        }
        if (kind_ == CriticKind::quadratic) {
            const int d = dx_ + dy_;
            RowVector z(d);
            z << x, y;
            Vector phi(params_.size());
            Eigen::Index k = 0;
            phi(k++) = 1.0;
            for (int i = 0; i < d; ++i) phi(k++) = z(i);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) phi(k++) = z(i) * z(j);
            return phi;
        }
        throw UsageError("the oracle critic has no feature map");
    }

    /// Raw score, capped at cap() from above.
    double operator()(Eigen::Ref<const RowVector> x, Eigen::Ref<const RowVector> y) const {
        double s;
        if (kind_ == CriticKind::gaussian_oracle) {
            check_shapes(x, y);
            const double rho = params_(0);
            const double r2 = rho * rho;
            s = params_(1);
            for (int k = 0; k < dx_; ++k)
                s += -0.5 * std::log(1.0 - r2) -
                     (r2 * x(k) * x(k) - 2.0 * rho * x(k) * y(k) + r2 * y(k) * y(k)) /
                         (2.0 * (1.0 - r2));
        } else {
            s = params_.dot(features(x, y));
        }
        if (!std::isfinite(s)) throw NumericalError("non-finite critic output");
        return std::min(s, cap_);
    }

private:
    Critic(CriticKind kind, int dx, int dy, Vector params)
        : kind_(kind), dx_(dx), dy_(dy), params_(std::move(params)) {}

    void check_shapes(Eigen::Ref<const RowVector> x, Eigen::Ref<const RowVector> y) const {
        if (x.size() != dx_ || y.size() != dy_) throw DataError("critic input dimension mismatch");
        if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite critic input");
    }

    CriticKind kind_;
    int dx_;
    int dy_;
    Vector params_;
    double cap_ = 50.0;
};

/// Contrastive bound on one batch of N aligned pairs:
/// (1/N) sum_i log( e^{f(x_i,y_i)} / ((1/N) sum_j e^{f(x_i,y_j)}) ). Never exceeds log N.
inline double cpc_estimate(const Critic& critic, const Matrix& xs, const Matrix& ys) {
    const Eigen::Index n = xs.rows();
    if (n < 2) throw DataError("CPC needs a batch of at least 2 pairs");
    if (ys.rows() != n) throw DataError("CPC batch xs and ys differ in length");
    double total = 0.0;
    Vector row(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) row(j) = critic(xs.row(i), ys.row(j));
        total += row(i) - detail::logsumexp(row);
    }
    return total / double(n) + std::log(double(n));
}

/// NWJ bound: mean f over joint pairs minus e^{-1} mean e^f over product pairs.
inline double nwj_estimate(const Critic& critic, const Matrix& joint_x, const Matrix& joint_y,
                           const Matrix& product_x, const Matrix& product_y) {
    if (joint_x.rows() < 1 || product_x.rows() < 1) throw DataError("NWJ needs non-empty samples");
    if (joint_x.rows() != joint_y.rows() || product_x.rows() != product_y.rows())
        throw DataError("NWJ sample sets are misaligned");
    double joint = 0.0;
    for (Eigen::Index i = 0; i < joint_x.rows(); ++i) joint += critic(joint_x.row(i), joint_y.row(i));
    double product = 0.0;
    for (Eigen::Index i = 0; i < product_x.rows(); ++i)
        product += std::exp(critic(product_x.row(i), product_y.row(i)));
    const double value = joint / double(joint_x.rows()) -
                         std::exp(-1.0) * product / double(product_x.rows());
    if (!std::isfinite(value)) throw NumericalError("non-finite NWJ estimate");
    return value;
}

/// Batching and optimiser settings for critic training and evaluation.
struct BatchSpec {
    int batch_size = 8;          // CPC batch N
    int batches_per_step = 16;   // CPC batches (or NWJ pairs / N) per gradient step
    int iterations = 300;
    double step_size = 0.01;     // Adam learning rate
    std::uint64_t seed = 0;
    double cap = 50.0;

    void validate() const {
        if (batch_size < 2) throw UsageError("batch size must be >= 2");
        if (batches_per_step < 1 || iterations < 0) throw UsageError("invalid iteration settings");
        if (!(step_size > 0)) throw UsageError("step size must be > 0");
        if (!(cap > 0)) throw UsageError("critic cap must be > 0");
    }
};

struct FittedCritic {
    Critic critic;
    int iterations = 0;
    double final_gradient = 0.0;  // max-abs gradient of the last step
};

namespace detail {

inline std::vector<Eigen::Index> permutation(Eigen::Index n, std::mt19937_64& rng) {
    std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), Eigen::Index{0});
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

/// Gradient of the CPC objective on one batch given by `rows`.
inline void cpc_gradient(const Critic& critic, const Matrix& xs, const Matrix& ys,
                         const std::vector<Eigen::Index>& rows, Vector& grad) {
    const auto n = Eigen::Index(rows.size());
    Vector scores(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto xi = xs.row(rows[std::size_t(i)]);
        for (Eigen::Index j = 0; j < n; ++j) scores(j) = critic(xi, ys.row(rows[std::size_t(j)]));
        const double lse = logsumexp(scores);
        grad += critic.features(xi, ys.row(rows[std::size_t(i)])) / double(n);
        for (Eigen::Index j = 0; j < n; ++j)
            grad -= std::exp(scores(j) - lse) * critic.features(xi, ys.row(rows[std::size_t(j)])) /
                    double(n);
    }
}

}  // namespace detail

/// Gradient ascent (Adam) on the chosen bound. Deterministic given spec.seed.
inline FittedCritic fit_critic(CriticKind kind, BoundObjective objective, const Matrix& xs,
                               const Matrix& ys, const BatchSpec& spec) {
    spec.validate();
    const Eigen::Index n = xs.rows();
    if (ys.rows() != n) throw DataError("critic data xs and ys differ in length");
    if (n < spec.batch_size) throw DataError("fewer samples than one batch");
    Critic critic = Critic::make(kind, int(xs.cols()), int(ys.cols()));
    critic.set_cap(spec.cap);

    std::mt19937_64 rng(spec.seed);
    const Eigen::Index p = critic.parameters().size();
    Vector m1 = Vector::Zero(p), m2 = Vector::Zero(p);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    FittedCritic out{critic, 0, 0.0};
    const Eigen::Index per_step =
        std::min<Eigen::Index>(n, Eigen::Index(spec.batch_size) * spec.batches_per_step);

    for (int it = 1; it <= spec.iterations; ++it) {
        const auto order = detail::permutation(n, rng);
        Vector grad = Vector::Zero(p);
        if (objective == BoundObjective::cpc) {
            const Eigen::Index batches = per_step / spec.batch_size;
            for (Eigen::Index b = 0; b < batches; ++b) {
                std::vector<Eigen::Index> rows(order.begin() + b * spec.batch_size,
                                               order.begin() + (b + 1) * spec.batch_size);
                detail::cpc_gradient(critic, xs, ys, rows, grad);
            }
            grad /= double(batches);
        } else {
            const auto shuffle = detail::permutation(n, rng);
            for (Eigen::Index k = 0; k < per_step; ++k) {
                const Eigen::Index i = order[std::size_t(k)];
                grad += critic.features(xs.row(i), ys.row(i));
                const Eigen::Index j = shuffle[std::size_t(k)];
                grad -= std::exp(critic(xs.row(i), ys.row(j)) - 1.0) *
                        critic.features(xs.row(i), ys.row(j));
            }
            grad /= double(per_step);
        }
        if (!grad.allFinite()) throw NumericalError("non-finite critic gradient");
        m1 = beta1 * m1 + (1 - beta1) * grad;
        m2 = beta2 * m2 + (1 - beta2) * grad.cwiseProduct(grad);
        const double c1 = 1 - std::pow(beta1, it), c2 = 1 - std::pow(beta2, it);
        critic.parameters() +=
            (spec.step_size * (m1 / c1).array() / ((m2 / c2).array().sqrt() + eps)).matrix();
        out.iterations = it;
        out.final_gradient = grad.cwiseAbs().maxCoeff();
    }
    out.critic = critic;
    return out;
}

/// Bound value of a critic on a dataset. CPC averages over disjoint batches
/// of spec.batch_size; NWJ pairs every x with a permuted y for the product term.
inline double evaluate_critic(const Critic& critic, BoundObjective objective, const Matrix& xs,
                              const Matrix& ys, const BatchSpec& spec) {
    spec.validate();
    const Eigen::Index n = xs.rows();
    if (ys.rows() != n) throw DataError("xs and ys differ in length");
    std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    const auto order = detail::permutation(n, rng);
    if (objective == BoundObjective::cpc) {
        const Eigen::Index batches = n / spec.batch_size;
        if (batches < 1) throw DataError("fewer samples than one batch");
        double total = 0.0;
        Matrix bx(spec.batch_size, xs.cols()), by(spec.batch_size, ys.cols());
        for (Eigen::Index b = 0; b < batches; ++b) {
            for (int k = 0; k < spec.batch_size; ++k) {
                const Eigen::Index r = order[std::size_t(b * spec.batch_size + k)];
                bx.row(k) = xs.row(r);
                by.row(k) = ys.row(r);
            }
            total += cpc_estimate(critic, bx, by);
        }
        return total / double(batches);
    }
    Matrix py(n, ys.cols());
    for (Eigen::Index i = 0; i < n; ++i) py.row(i) = ys.row(order[std::size_t(i)]);
    return nwj_estimate(critic, xs, ys, xs, py);
}

/// Fit then evaluate in-sample; the symmetric MI proxy used as a tree baseline.
inline double baseline_mutual_information(CriticKind kind, BoundObjective objective,
                                          const Matrix& xs, const Matrix& ys,
                                          const BatchSpec& spec) {
    const FittedCritic fitted = fit_critic(kind, objective, xs, ys, spec);
    return evaluate_critic(fitted.critic, objective, xs, ys, spec);
}

}  // namespace finfo
