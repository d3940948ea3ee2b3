#pragma once

// Predictive families: sets of maps from side information (or nothing) to
// distributions over the target space, each closed under ignoring its input.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "finfo/data.hpp"
#include "finfo/error.hpp"

namespace finfo {

enum class FamilyKind {
    tabular,
    gaussian_mean,
    laplace_mean,
    linear_gaussian,
    polynomial_gaussian,
    categorical_softmax,
};

inline std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::tabular: return "tabular";
        case FamilyKind::gaussian_mean: return "gaussian_mean";
        case FamilyKind::laplace_mean: return "laplace_mean";
        case FamilyKind::linear_gaussian: return "linear_gaussian";
        case FamilyKind::polynomial_gaussian: return "polynomial_gaussian";
        case FamilyKind::categorical_softmax: return "categorical_softmax";
    }
    return "unknown";
}

inline FamilyKind parse_family_kind(const std::string& s) {
    for (auto k : {FamilyKind::tabular, FamilyKind::gaussian_mean, FamilyKind::laplace_mean,
                   FamilyKind::linear_gaussian, FamilyKind::polynomial_gaussian,
                   FamilyKind::categorical_softmax})
        if (to_string(k) == s) return k;
    throw UsageError("unknown family '" + s + "'");
}

enum class FitMode { closed_form, gradient };

struct GradientSettings {
    int max_iters = 20000;
    double step_size = 0.0;  // <= 0: 1/L from the design's Lipschitz constant
    double tolerance = 1e-8;  // on the max-abs gradient mapping
};

struct FamilyConfig {
    FamilyKind kind = FamilyKind::linear_gaussian;
    int order = 1;  // polynomial_gaussian only
    FitMode fit_mode = FitMode::closed_form;
    GradientSettings gradient{};
    std::optional<double> norm_radius;  // spectral-norm bound on (W, b)
    std::optional<double> clip;         // log-densities clamped to [-clip, clip]

    static FamilyConfig of(FamilyKind kind) {
        FamilyConfig c;
        c.kind = kind;
        return c;
    }
    static FamilyConfig polynomial(int order) {
        FamilyConfig c;
        c.kind = FamilyKind::polynomial_gaussian;
        c.order = order;
        return c;
    }

    void validate() const {
        if (kind == FamilyKind::polynomial_gaussian && order < 1)
            throw UsageError("polynomial order must be >= 1");
        if (clip && !(*clip > 0)) throw UsageError("clip bound B must be > 0");
        if (norm_radius && !(*norm_radius > 0)) throw UsageError("norm radius must be > 0");
        if (gradient.max_iters < 1) throw UsageError("max_iters must be >= 1");
        if (!(gradient.tolerance > 0)) throw UsageError("gradient tolerance must be > 0");
    }

    bool gaussian() const noexcept {
        return kind == FamilyKind::gaussian_mean || kind == FamilyKind::linear_gaussian ||
               kind == FamilyKind::polynomial_gaussian;
    }
    bool categorical_target() const noexcept {
        return kind == FamilyKind::tabular || kind == FamilyKind::categorical_softmax;
    }
};

// ---------------------------------------------------------------------------
// Distributions over Y

/// Gaussian log-normaliser for covariance ½I: log f(y) = -(d/2) log pi - |y - mu|^2.
inline double gaussian_half_log_norm(int d) { return 0.5 * d * std::log(std::numbers::pi); }

/// log of Z_d = integral over R^d of exp(-|u|_2) du = 2 pi^{d/2} Gamma(d) / Gamma(d/2).
inline double laplace_log_normalizer(int d) {
    return std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) + std::lgamma(double(d)) -
           std::lgamma(0.5 * d);
}

struct CategoricalPmf {
    std::vector<double> probs;
};
struct IsoGaussian {
    Vector mean;  // covariance fixed at ½I
};
struct LaplaceLocation {
    Vector location;
};

using Distribution = std::variant<CategoricalPmf, IsoGaussian, LaplaceLocation>;

namespace detail {

inline void check_finite(Eigen::Ref<const RowVector> v, const char* what) {
    if (!v.allFinite()) throw DataError(std::string("non-finite ") + what);
}

inline int checked_symbol(Eigen::Ref<const RowVector> y, int cardinality) {
    if (y.size() != 1) throw DataError("categorical sample must have exactly one column");
    const double v = y(0);
    if (!std::isfinite(v) || v < 0 || v >= cardinality || v != std::floor(v))
        throw DataError("categorical symbol " + std::to_string(v) + " out of range [0, " +
                        std::to_string(cardinality) + ")");
    return static_cast<int>(v);
}

inline double clamp_log(double v, const std::optional<double>& clip) {
    if (!clip) return v;
    return std::clamp(v, -*clip, *clip);
}

inline double logsumexp(Eigen::Ref<const Vector> v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace detail

inline int target_columns(const Distribution& d) {
    return std::visit(
        [](const auto& p) -> int {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CategoricalPmf>) return 1;
            else if constexpr (std::is_same_v<T, IsoGaussian>) return int(p.mean.size());
            else return int(p.location.size());
        },
        d);
}

/// Unclipped log-density of y under d, in nats.
inline double log_density(const Distribution& d, Eigen::Ref<const RowVector> y) {
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, CategoricalPmf>) {
                const int s = detail::checked_symbol(y, int(p.probs.size()));
                return std::log(p.probs[s]);
            } else {
                detail::check_finite(y, "target sample");
                if constexpr (std::is_same_v<T, IsoGaussian>) {
                    if (y.size() != p.mean.size()) throw DataError("target dimension mismatch");
                    return -gaussian_half_log_norm(int(p.mean.size())) -
                           (y.transpose() - p.mean).squaredNorm();
                } else {
                    if (y.size() != p.location.size()) throw DataError("target dimension mismatch");
                    return -laplace_log_normalizer(int(p.location.size())) -
                           (y.transpose() - p.location).norm();
                }
            }
        },
        d);
}

// ---------------------------------------------------------------------------
// Predictors

/// f[∅]: a single distribution over Y.
struct MarginalPredictor {
    FamilyKind family;
    Distribution distribution;
    std::optional<double> clip;

    double log_density(Eigen::Ref<const RowVector> y) const {
        return detail::clamp_log(finfo::log_density(distribution, y), clip);
    }
};

/// Maps a side-information row to the feature vector a parametric family uses.
class FeatureMap {
public:
    enum class Kind { none, identity, polynomial, one_hot };

    FeatureMap() = default;
    FeatureMap(Kind kind, int input_columns, int order_or_cardinality)
        : kind_(kind), input_columns_(input_columns), param_(order_or_cardinality) {}

    static FeatureMap for_input(const FamilyConfig& config, const VariableSpec& x) {
        switch (config.kind) {
            case FamilyKind::gaussian_mean:
            case FamilyKind::laplace_mean:
                return {Kind::none, x.columns(), 0};
            case FamilyKind::linear_gaussian:
            case FamilyKind::categorical_softmax:
                if (x.is_categorical()) return {Kind::one_hot, 1, x.cardinality()};
                return {Kind::identity, x.dim(), 1};
            case FamilyKind::polynomial_gaussian:
                if (x.is_categorical())
                    throw DataError("polynomial_gaussian needs real-valued side information");
                return {Kind::polynomial, x.dim(), config.order};
            case FamilyKind::tabular:
                break;
        }
        throw UsageError("family " + to_string(config.kind) + " has no feature map");
    }

    Kind kind() const noexcept { return kind_; }
    int input_columns() const noexcept { return input_columns_; }

    int size() const noexcept {
        switch (kind_) {
            case Kind::none: return 0;
            case Kind::identity: return input_columns_;
            case Kind::polynomial: return input_columns_ * param_;
            case Kind::one_hot: return param_;
        }
        return 0;
    }

    /// Polynomial features are ordered power-major (all x_k, then all x_k^2, ...)
    /// so lower-order feature sets are prefixes of higher-order ones.
    RowVector apply(Eigen::Ref<const RowVector> x) const {
        if (x.size() != input_columns_)
            throw DataError("side information has " + std::to_string(x.size()) +
                            " columns, predictor expects " + std::to_string(input_columns_));
        RowVector out = RowVector::Zero(size());
        switch (kind_) {
            case Kind::none: break;
            case Kind::identity:
                detail::check_finite(x, "side information");
                out = x;
                break;
            case Kind::polynomial: {
                detail::check_finite(x, "side information");
                RowVector power = x;
                for (int p = 0; p < param_; ++p) {
                    out.segment(p * input_columns_, input_columns_) = power;
                    power = power.cwiseProduct(x);
                }
                break;
            }
            case Kind::one_hot: out(detail::checked_symbol(x, param_)) = 1.0; break;
        }
        return out;
    }

    Matrix design(const Matrix& xs) const {
        Matrix out(xs.rows(), size());
        for (Eigen::Index i = 0; i < xs.rows(); ++i) out.row(i) = apply(xs.row(i));
        return out;
    }

private:
    Kind kind_ = Kind::none;
    int input_columns_ = 0;
    int param_ = 0;
};

struct FitReport {
    int iterations = 0;
    bool converged = true;
    double final_gradient = 0.0;  // max-abs gradient mapping at exit
};

/// Tabular: one pmf per x symbol; unseen symbols fall back to `fallback`.
struct TabularMap {
    std::vector<std::vector<double>> rows;
    std::vector<double> fallback;
};
/// mean(x) = weights * phi(x) + bias, covariance ½I.
struct GaussianMeanMap {
    FeatureMap features;
    Matrix weights;  // d_y x |phi|
    Vector bias;
};
struct LaplaceConstantMap {
    Vector location;
};
/// p(y | x) = softmax(weights * phi(x) + bias).
struct SoftmaxMap {
    FeatureMap features;
    Matrix weights;  // C x |phi|
    Vector bias;
};

using ConditionalMap = std::variant<TabularMap, GaussianMeanMap, LaplaceConstantMap, SoftmaxMap>;

/// f[x]: a member of a predictive family evaluated with side information.
class ConditionalPredictor {
public:
    ConditionalPredictor(FamilyKind family, ConditionalMap map, std::optional<double> clip,
                         FitReport report = {})
        : family_(family), map_(std::move(map)), clip_(clip), report_(report) {}

    FamilyKind family() const noexcept { return family_; }
    const ConditionalMap& map() const noexcept { return map_; }
    const FitReport& report() const noexcept { return report_; }
    const std::optional<double>& clip() const noexcept { return clip_; }

    /// The distribution f[x].
    Distribution output_at(Eigen::Ref<const RowVector> x) const {
        return std::visit(
            [&](const auto& m) -> Distribution {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, TabularMap>) {
                    const int s = detail::checked_symbol(x, int(m.rows.size()));
                    const auto& row = m.rows[s];
                    return CategoricalPmf{row.empty() ? m.fallback : row};
                } else if constexpr (std::is_same_v<T, GaussianMeanMap>) {
                    const RowVector phi = m.features.apply(x);
                    return IsoGaussian{m.weights * phi.transpose() + m.bias};
                } else if constexpr (std::is_same_v<T, LaplaceConstantMap>) {
                    if (x.size() > 0) detail::check_finite(x, "side information");
                    return LaplaceLocation{m.location};
                } else {
                    const RowVector phi = m.features.apply(x);
                    const Vector logits = m.weights * phi.transpose() + m.bias;
                    const double lse = detail::logsumexp(logits);
                    CategoricalPmf pmf;
                    pmf.probs.resize(std::size_t(logits.size()));
                    for (Eigen::Index c = 0; c < logits.size(); ++c)
                        pmf.probs[std::size_t(c)] = std::exp(logits(c) - lse);
                    return pmf;
                }
            },
            map_);
    }

    MarginalPredictor at(Eigen::Ref<const RowVector> x) const {
        return {family_, output_at(x), clip_};
    }

    double log_density(Eigen::Ref<const RowVector> x, Eigen::Ref<const RowVector> y) const {
        if (const auto* s = std::get_if<SoftmaxMap>(&map_)) {
            const RowVector phi = s->features.apply(x);
            const Vector logits = s->weights * phi.transpose() + s->bias;
            const int c = detail::checked_symbol(y, int(logits.size()));
            return detail::clamp_log(logits(c) - detail::logsumexp(logits), clip_);
        }
        return detail::clamp_log(finfo::log_density(output_at(x), y), clip_);
    }

    /// log f[x_i](y_i) for every aligned row.
    Vector log_densities(const Matrix& xs, const Matrix& ys) const {
        if (xs.rows() != ys.rows()) throw DataError("xs and ys differ in length");
        Vector out(ys.rows());
        if (const auto* g = std::get_if<GaussianMeanMap>(&map_)) {
            const Matrix means = mean_matrix(*g, xs);
            if (!ys.allFinite()) throw DataError("non-finite target sample");
            if (ys.cols() != g->bias.size()) throw DataError("target dimension mismatch");
            const double c = gaussian_half_log_norm(int(ys.cols()));
            out = -((ys - means).rowwise().squaredNorm().array() + c).matrix();
            for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = detail::clamp_log(out(i), clip_);
            return out;
        }
        for (Eigen::Index i = 0; i < ys.rows(); ++i) out(i) = log_density(xs.row(i), ys.row(i));
        return out;
    }

    /// A member of the same family that outputs `p` for every input: the
    /// optional-ignorance witness.
    static ConditionalPredictor constant(FamilyKind family, const FeatureMap& features,
                                         const Distribution& p, std::optional<double> clip,
                                         int x_cardinality = 0) {
        switch (family) {
            case FamilyKind::tabular: {
                const auto& pmf = std::get<CategoricalPmf>(p);
                return {family, TabularMap{std::vector<std::vector<double>>(
                                               std::size_t(std::max(x_cardinality, 1)), pmf.probs),
                                           pmf.probs},
                        clip};
            }
            case FamilyKind::gaussian_mean:
            case FamilyKind::linear_gaussian:
            case FamilyKind::polynomial_gaussian: {
                const auto& g = std::get<IsoGaussian>(p);
                return {family,
                        GaussianMeanMap{features, Matrix::Zero(g.mean.size(), features.size()),
                                        g.mean},
                        clip};
            }
            case FamilyKind::laplace_mean:
                return {family, LaplaceConstantMap{std::get<LaplaceLocation>(p).location}, clip};
            case FamilyKind::categorical_softmax: {
                const auto& pmf = std::get<CategoricalPmf>(p);
                Vector bias(Eigen::Index(pmf.probs.size()));
                for (std::size_t c = 0; c < pmf.probs.size(); ++c)
                    bias(Eigen::Index(c)) = std::log(pmf.probs[c]);
                return {family,
                        SoftmaxMap{features, Matrix::Zero(bias.size(), features.size()), bias},
                        clip};
            }
        }
        throw UsageError("unknown family");
    }

    /// Feature map used by parametric families (identity-free for tabular).
    FeatureMap features() const {
        if (const auto* g = std::get_if<GaussianMeanMap>(&map_)) return g->features;
        if (const auto* s = std::get_if<SoftmaxMap>(&map_)) return s->features;
        return {};
    }

private:
    static Matrix mean_matrix(const GaussianMeanMap& g, const Matrix& xs) {
        Matrix means = Matrix::Zero(xs.rows(), g.bias.size());
        if (g.features.size() > 0) means = g.features.design(xs) * g.weights.transpose();
        else if (!xs.allFinite()) throw DataError("non-finite side information");
        means.rowwise() += g.bias.transpose();
        return means;
    }

    FamilyKind family_;
    ConditionalMap map_;
    std::optional<double> clip_;
    FitReport report_;
};

// ---------------------------------------------------------------------------
// Fitting

namespace detail {

inline void require_target(const FamilyConfig& config, const Samples& ys) {
    if (ys.size() < 1) throw DataError("empty sample list");
    validate(ys, "target samples");
    if (config.categorical_target() && !ys.spec.is_categorical())
        throw DataError(to_string(config.kind) + " needs a categorical target");
    if (!config.categorical_target() && !ys.spec.is_real())
        throw DataError(to_string(config.kind) + " needs a real-valued target");
}

inline std::vector<double> empirical_pmf(const Samples& ys) {
    std::vector<double> pmf(std::size_t(ys.spec.cardinality()), 0.0);
    for (Eigen::Index i = 0; i < ys.size(); ++i) pmf[std::size_t(ys.symbol(i))] += 1.0;
    for (double& p : pmf) p /= double(ys.size());
    return pmf;
}

/// Geometric median by Weiszfeld iteration with the Vardi-Zhang correction
/// for iterates that land on a data point.
inline Vector geometric_median(const Matrix& ys, double tolerance = 1e-9, int max_iters = 10000) {
    Vector y = ys.colwise().mean().transpose();
    const Eigen::Index n = ys.rows();
    for (int it = 0; it < max_iters; ++it) {
        Vector numer = Vector::Zero(y.size());
        Vector pull = Vector::Zero(y.size());
        double denom = 0.0;
        int coincident = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vector diff = ys.row(i).transpose() - y;
            const double dist = diff.norm();
            if (dist <= 1e-14 * (1.0 + y.norm())) {
                ++coincident;
                continue;
            }
            numer += ys.row(i).transpose() / dist;
            denom += 1.0 / dist;
            pull += diff / dist;
        }
        if (denom == 0.0) return y;  // every sample coincides with y
        const Vector t = numer / denom;
        Vector next;
        if (coincident == 0) {
            next = t;
        } else {
            const double r = pull.norm();
            if (r <= coincident) return y;  // y is optimal
            const double eta = coincident / r;
            next = (1.0 - eta) * t + eta * y;
        }
        const double move = (next - y).norm();
        y = std::move(next);
        if (move <= tolerance) break;
    }
    return y;
}

/// Largest eigenvalue of a symmetric PSD matrix.
inline double max_eigenvalue(const Matrix& gram) {
    if (gram.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Projection of theta onto {|theta|_2 <= r} (spectral norm).
inline Matrix project_spectral(const Matrix& theta, double radius) {
    Eigen::JacobiSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= radius) return theta;
    const Vector clipped = s.cwiseMin(radius);
    return svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
}

/// Minimises mean |y - theta * [phi; 1]|^2 over theta, optionally inside a
/// spectral-norm ball, by accelerated projected gradient descent.
inline Matrix fit_gaussian_gradient(const Matrix& design1, const Matrix& ys, const Matrix& start,
                                    const FamilyConfig& config, FitReport& report) {
    const double n = double(design1.rows());
    const Matrix gram = design1.transpose() * design1 / n;
    const Matrix cross = ys.transpose() * design1 / n;  // d_y x (F+1)
    const double lipschitz = 2.0 * max_eigenvalue(gram);
    const double step = config.gradient.step_size > 0 ? config.gradient.step_size
                                                      : (lipschitz > 0 ? 1.0 / lipschitz : 1.0);
    auto project = [&](const Matrix& t) {
        return config.norm_radius ? project_spectral(t, *config.norm_radius) : t;
    };
    auto gradient = [&](const Matrix& t) -> Matrix { return 2.0 * (t * gram - cross); };

    Matrix theta = project(start);
    Matrix momentum_point = theta;
    double tk = 1.0;
    report = FitReport{0, false, 0.0};
    for (int it = 1; it <= config.gradient.max_iters; ++it) {
        const Matrix next = project(momentum_point - step * gradient(momentum_point));
        const double mapping = ((momentum_point - next) / step).cwiseAbs().maxCoeff();
        const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        momentum_point = next + ((tk - 1.0) / tnext) * (next - theta);
        theta = next;
        tk = tnext;
        report.iterations = it;
        report.final_gradient = mapping;
        if (mapping <= config.gradient.tolerance) {
            report.converged = true;
            break;
        }
    }
    return theta;
}

inline Matrix with_bias_column(const Matrix& design) {
    Matrix out(design.rows(), design.cols() + 1);
    out.leftCols(design.cols()) = design;
    out.col(design.cols()).setOnes();
    return out;
}

inline ConditionalPredictor fit_gaussian_conditional(const FamilyConfig& config,
                                                     const Samples& xs, const Samples& ys) {
    const FeatureMap features = FeatureMap::for_input(config, xs.spec);
    const Matrix design1 = with_bias_column(features.design(xs.values));
    // Minimum-norm least squares; rank-deficient designs resolve through the
    // pseudo-inverse.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design1);
    Matrix theta = cod.solve(ys.values).transpose();  // d_y x (F+1)
    FitReport report;
    if (config.norm_radius || config.fit_mode == FitMode::gradient) {
        const Matrix start = config.fit_mode == FitMode::gradient
                                 ? Matrix::Zero(theta.rows(), theta.cols())
                                 : theta;
        theta = fit_gaussian_gradient(design1, ys.values, start, config, report);
    }
    const Eigen::Index f = features.size();
    return {config.kind,
            GaussianMeanMap{features, theta.leftCols(f), theta.col(f)},
            config.clip, report};
}

inline ConditionalPredictor fit_softmax_conditional(const FamilyConfig& config, const Samples& xs,
                                                    const Samples& ys) {
    const FeatureMap features = FeatureMap::for_input(config, xs.spec);
    const Matrix design1 = with_bias_column(features.design(xs.values));
    const Eigen::Index n = design1.rows();
    const int classes = ys.spec.cardinality();
    Matrix onehot = Matrix::Zero(n, classes);
    for (Eigen::Index i = 0; i < n; ++i) onehot(i, ys.symbol(i)) = 1.0;

    const Matrix gram = design1.transpose() * design1 / double(n);
    const double lipschitz = max_eigenvalue(gram);
    const double step = config.gradient.step_size > 0 ? config.gradient.step_size
                                                      : (lipschitz > 0 ? 1.0 / lipschitz : 1.0);
    auto gradient = [&](const Matrix& theta) -> Matrix {
        Matrix logits = design1 * theta.transpose();  // n x C
        for (Eigen::Index i = 0; i < n; ++i) {
            const double lse = logsumexp(logits.row(i).transpose());
            logits.row(i) = (logits.row(i).array() - lse).exp().matrix();
        }
        return (logits - onehot).transpose() * design1 / double(n);
    };
    auto project = [&](const Matrix& t) {
        return config.norm_radius ? project_spectral(t, *config.norm_radius) : t;
    };

    Matrix theta = Matrix::Zero(classes, design1.cols());
    Matrix momentum_point = theta;
    double tk = 1.0;
    FitReport report{0, false, 0.0};
    for (int it = 1; it <= config.gradient.max_iters; ++it) {
        const Matrix next = project(momentum_point - step * gradient(momentum_point));
        const double mapping = ((momentum_point - next) / step).cwiseAbs().maxCoeff();
        const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        momentum_point = next + ((tk - 1.0) / tnext) * (next - theta);
        theta = next;
        tk = tnext;
        report.iterations = it;
        report.final_gradient = mapping;
        if (mapping <= config.gradient.tolerance) {
            report.converged = true;
            break;
        }
    }
    const Eigen::Index f = features.size();
    return {config.kind, SoftmaxMap{features, theta.leftCols(f), theta.col(f)}, config.clip,
            report};
}

}  // namespace detail

/// Member of the family minimising the empirical negative log-likelihood of
/// ys with no side information.
inline MarginalPredictor fit_marginal(const FamilyConfig& config, const Samples& ys) {
    config.validate();
    detail::require_target(config, ys);
    switch (config.kind) {
        case FamilyKind::tabular:
        case FamilyKind::categorical_softmax:
            return {config.kind, CategoricalPmf{detail::empirical_pmf(ys)}, config.clip};
        case FamilyKind::gaussian_mean:
        case FamilyKind::linear_gaussian:
        case FamilyKind::polynomial_gaussian:
            return {config.kind, IsoGaussian{ys.values.colwise().mean().transpose()}, config.clip};
        case FamilyKind::laplace_mean:
            return {config.kind, LaplaceLocation{detail::geometric_median(ys.values)}, config.clip};
    }
    throw UsageError("unknown family");
}

/// Member of the family minimising the empirical conditional negative
/// log-likelihood of ys given xs.
inline ConditionalPredictor fit_conditional(const FamilyConfig& config, const Samples& xs,
                                            const Samples& ys) {
    config.validate();
    if (xs.size() != ys.size())
        throw DataError("xs has " + std::to_string(xs.size()) + " samples, ys has " +
                        std::to_string(ys.size()));
    detail::require_target(config, ys);
    validate(xs, "side-information samples");
    switch (config.kind) {
        case FamilyKind::tabular: {
            if (!xs.spec.is_categorical())
                throw DataError("tabular family needs categorical side information");
            const int cx = xs.spec.cardinality();
            const int cy = ys.spec.cardinality();
            std::vector<std::vector<double>> counts(std::size_t(cx), std::vector<double>(cy, 0.0));
            std::vector<double> totals(std::size_t(cx), 0.0);
            for (Eigen::Index i = 0; i < ys.size(); ++i) {
                counts[std::size_t(xs.symbol(i))][std::size_t(ys.symbol(i))] += 1.0;
                totals[std::size_t(xs.symbol(i))] += 1.0;
            }
            TabularMap map{{}, detail::empirical_pmf(ys)};
            map.rows.resize(std::size_t(cx));
            for (int x = 0; x < cx; ++x) {
                if (totals[std::size_t(x)] == 0) continue;  // unseen: falls back to marginal
                map.rows[std::size_t(x)] = counts[std::size_t(x)];
                for (double& p : map.rows[std::size_t(x)]) p /= totals[std::size_t(x)];
            }
            return {config.kind, std::move(map), config.clip};
        }
        case FamilyKind::gaussian_mean:
        case FamilyKind::linear_gaussian:
        case FamilyKind::polynomial_gaussian:
            return detail::fit_gaussian_conditional(config, xs, ys);
        case FamilyKind::laplace_mean:
            return {config.kind, LaplaceConstantMap{detail::geometric_median(ys.values)},
                    config.clip};
        case FamilyKind::categorical_softmax:
            return detail::fit_softmax_conditional(config, xs, ys);
    }
    throw UsageError("unknown family");
}

inline double log_density(const MarginalPredictor& f, Eigen::Ref<const RowVector> y) {
    return f.log_density(y);
}

inline double log_density(const ConditionalPredictor& f, Eigen::Ref<const RowVector> x,
                          Eigen::Ref<const RowVector> y) {
    return f.log_density(x, y);
}

}  // namespace finfo
