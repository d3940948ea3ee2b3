#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "finfo/data.hpp"
#include "finfo/error.hpp"
#include "finfo/families.hpp"

namespace finfo {

enum class BoundKind { generic_rademacher, corollary1 };

inline std::string to_string(BoundKind k) {
    return k == BoundKind::generic_rademacher ? "generic_rademacher" : "corollary1";
}

struct PacBound {
    double delta = 0.1;
    double half_width = 0.0;
    BoundKind kind = BoundKind::generic_rademacher;
};

/// Empirical F-information with its two entropy terms, in nats.
struct FInfoEstimate {
    double point_estimate = 0.0;
    double h_marginal = 0.0;
    double h_conditional = 0.0;
    Eigen::Index sample_count = 0;
    std::optional<PacBound> pac;
    bool clamped_nonnegative = false;
    bool converged = true;  // false if an iterative fit hit max_iters
    bool holdout = false;
};

/// Confidence-bound request. Exactly one of `rademacher_bound` or
/// (`k_x`, `k_y`) selects the bound.
struct PacConfig {
    double delta = 0.1;
    std::optional<double> B;
    std::optional<double> rademacher_bound;
    std::optional<double> k_x;
    std::optional<double> k_y;

    void validate() const {
        if (!(delta > 0.0 && delta < 0.5))
            throw UsageError("delta must lie in (0, 0.5), got " + std::to_string(delta));
        const bool generic = rademacher_bound.has_value();
        const bool corollary = k_x.has_value() || k_y.has_value();
        if (generic == corollary)
            throw UsageError("PAC bound needs exactly one of a Rademacher bound or (k_x, k_y)");
        if (generic && *rademacher_bound < 0) throw UsageError("Rademacher bound must be >= 0");
        if (corollary && !(k_x && k_y && *k_x > 0 && *k_y > 0))
            throw UsageError("k_x and k_y must both be given and positive");
        if (B && !(*B > 0)) throw UsageError("B must be > 0");
    }
};

/// Half-width 4R + 2B sqrt(2 log(1/delta) / n) for a family whose log-densities
/// lie in [-B, B] and whose Rademacher complexity is at most R.
inline double rademacher_half_width(double rademacher, double B, double delta, Eigen::Index n) {
    if (!(delta > 0.0 && delta < 0.5)) throw UsageError("delta must lie in (0, 0.5)");
    if (n < 1) throw UsageError("sample count must be >= 1");
    if (rademacher < 0 || !(B > 0)) throw UsageError("need R >= 0 and B > 0");
    return 4.0 * rademacher + 2.0 * B * std::sqrt(2.0 * std::log(1.0 / delta) / double(n));
}

/// Closed-form half-width for norm-constrained linear-Gaussian predictors with
/// |x| <= k_x and |y| <= k_y: M / sqrt(4n) * (1 + 4 sqrt(2 log(1/delta))),
/// M = (k_x + k_y)^2 + log 2pi.
inline double corollary1_half_width(double k_x, double k_y, double delta, Eigen::Index n) {
    if (!(k_x > 0 && k_y > 0)) throw UsageError("k_x and k_y must be positive");
    if (!(delta > 0.0 && delta < 0.5)) throw UsageError("delta must lie in (0, 0.5)");
    if (n < 1) throw UsageError("sample count must be >= 1");
    const double m = (k_x + k_y) * (k_x + k_y) + std::log(2.0 * std::numbers::pi);
    return m / std::sqrt(4.0 * double(n)) * (1.0 + 4.0 * std::sqrt(2.0 * std::log(1.0 / delta)));
}

namespace detail {

inline double checked_mean_nll(const Vector& log_densities) {
    const double mean = -log_densities.mean();
    if (!std::isfinite(mean))
        throw NumericalError(
            "infinite negative log-density (zero-probability sample); set a clip bound B");
    return mean;
}

}  // namespace detail

inline double mean_negative_log_density(const MarginalPredictor& f, const Samples& ys) {
    Vector lp(ys.size());
    for (Eigen::Index i = 0; i < ys.size(); ++i) lp(i) = f.log_density(ys.values.row(i));
    return detail::checked_mean_nll(lp);
}

inline double mean_negative_log_density(const ConditionalPredictor& f, const Samples& xs,
                                        const Samples& ys) {
    return detail::checked_mean_nll(f.log_densities(xs.values, ys.values));
}

/// In-sample F-entropy: fit the marginal on ys, average -log f[∅](y) over ys.
inline double empirical_f_entropy(const FamilyConfig& config, const Samples& ys) {
    return mean_negative_log_density(fit_marginal(config, ys), ys);
}

inline double empirical_conditional_f_entropy(const FamilyConfig& config, const Samples& xs,
                                              const Samples& ys) {
    return mean_negative_log_density(fit_conditional(config, xs, ys), xs, ys);
}

namespace detail {

inline void attach_pac(FInfoEstimate& est, const FamilyConfig& config, const PacConfig& pac) {
    pac.validate();
    PacBound bound;
    bound.delta = pac.delta;
    if (pac.rademacher_bound) {
        const std::optional<double> B = pac.B ? pac.B : config.clip;
        if (!B) throw UsageError("the Rademacher bound needs a log-density bound B");
        bound.kind = BoundKind::generic_rademacher;
        bound.half_width = rademacher_half_width(*pac.rademacher_bound, *B, pac.delta,
                                                 est.sample_count);
    } else {
        if (config.kind != FamilyKind::linear_gaussian || !config.norm_radius ||
            *config.norm_radius > 1.0)
            throw UsageError(
                "the (k_x, k_y) bound applies only to linear_gaussian with norm radius <= 1");
        bound.kind = BoundKind::corollary1;
        bound.half_width = corollary1_half_width(*pac.k_x, *pac.k_y, pac.delta, est.sample_count);
    }
    est.pac = bound;
}

inline void finish(FInfoEstimate& est, bool clamp) {
    est.point_estimate = est.h_marginal - est.h_conditional;
    if (clamp && est.point_estimate < 0) {
        est.point_estimate = 0.0;
        est.clamped_nonnegative = true;
    }
}

}  // namespace detail

/// Empirical F-information I(X -> Y; D): both infima are taken and evaluated
/// on the same samples.
inline FInfoEstimate empirical_f_information(const FamilyConfig& config, const Samples& xs,
                                             const Samples& ys,
                                             const std::optional<PacConfig>& pac = std::nullopt,
                                             bool clamp = false) {
    if (xs.size() != ys.size()) throw DataError("xs and ys differ in length");
    if (ys.size() < 2) throw DataError("F-information needs at least 2 samples");
    const ConditionalPredictor conditional = fit_conditional(config, xs, ys);
    FInfoEstimate est;
    est.sample_count = ys.size();
    est.h_marginal = empirical_f_entropy(config, ys);
    est.h_conditional = mean_negative_log_density(conditional, xs, ys);
    est.converged = conditional.report().converged;
    detail::finish(est, clamp);
    if (pac) detail::attach_pac(est, config, *pac);
    return est;
}

/// Out-of-sample variant: fit on the train split, score on the test split.
/// Not clamped; the estimate can be negative.
inline FInfoEstimate holdout_f_information(const FamilyConfig& config, const Samples& train_xs,
                                           const Samples& train_ys, const Samples& test_xs,
                                           const Samples& test_ys) {
    if (train_ys.size() < 1 || test_ys.size() < 1) throw DataError("empty split");
    if (test_xs.size() != test_ys.size()) throw DataError("test xs and ys differ in length");
    validate(test_ys, "test targets");
    const ConditionalPredictor conditional = fit_conditional(config, train_xs, train_ys);
    const MarginalPredictor marginal = fit_marginal(config, train_ys);
    FInfoEstimate est;
    est.sample_count = test_ys.size();
    est.h_marginal = mean_negative_log_density(marginal, test_ys);
    est.h_conditional = mean_negative_log_density(conditional, test_xs, test_ys);
    est.converged = conditional.report().converged;
    est.holdout = true;
    detail::finish(est, false);
    return est;
}

}  // namespace finfo
