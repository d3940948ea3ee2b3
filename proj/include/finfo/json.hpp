#pragma once

// JSON forms of the toolkit's configs and results (nlohmann::json, found via
// ADL). Arborescence: {"root", "parents" (root entry -1), "total_weight"}.

#include <string>
#include <vector>

#include <json.hpp>

#include "finfo/arborescence.hpp"
#include "finfo/estimation.hpp"
#include "finfo/families.hpp"
#include "finfo/synth.hpp"

namespace finfo {

using json = nlohmann::json;

namespace detail {

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    const auto rows = Eigen::Index(j.size());
    const auto cols = rows ? Eigen::Index(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (Eigen::Index(j.at(std::size_t(i)).size()) != cols) throw DataError("ragged matrix");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(std::size_t(i)).at(std::size_t(k)).get<double>();
    }
    return m;
}

}  // namespace detail

inline void to_json(json& j, const Arborescence& a) {
    j = json{{"root", a.root}, {"parents", a.parent}, {"total_weight", a.total_weight}};
}

inline void from_json(const json& j, Arborescence& a) {
    a.root = j.at("root").get<int>();
    a.parent = j.at("parents").get<std::vector<int>>();
    a.total_weight = j.value("total_weight", 0.0);
    if (a.root >= 0 && a.root < int(a.parent.size())) a.parent[std::size_t(a.root)] = -1;
    if (!is_spanning_arborescence(a.parent, a.root))
        throw DataError("JSON tree is not a spanning arborescence");
}

inline void to_json(json& j, const EdgeWeightMatrix& w) { j = detail::matrix_to_json(w.w); }

inline void to_json(json& j, const FamilyConfig& c) {
    j = json{{"family", to_string(c.kind)},
             {"fit_mode", c.fit_mode == FitMode::closed_form ? "closed_form" : "gradient"},
             {"max_iters", c.gradient.max_iters},
             {"step_size", c.gradient.step_size},
             {"tolerance", c.gradient.tolerance},
             {"norm_radius", c.norm_radius ? json(*c.norm_radius) : json(nullptr)},
             {"clip", c.clip ? json(*c.clip) : json(nullptr)}};
    if (c.kind == FamilyKind::polynomial_gaussian) j["order"] = c.order;
}

inline void from_json(const json& j, FamilyConfig& c) {
    c = FamilyConfig{};
    if (j.contains("family")) c.kind = parse_family_kind(j.at("family").get<std::string>());
    detail::read_optional(j, "order", c.order);
    if (j.contains("fit_mode")) {
        const auto mode = j.at("fit_mode").get<std::string>();
        if (mode == "closed_form") c.fit_mode = FitMode::closed_form;
        else if (mode == "gradient") c.fit_mode = FitMode::gradient;
        else throw UsageError("unknown fit_mode '" + mode + "'");
    }
    detail::read_optional(j, "max_iters", c.gradient.max_iters);
    detail::read_optional(j, "step_size", c.gradient.step_size);
    detail::read_optional(j, "tolerance", c.gradient.tolerance);
    if (j.contains("norm_radius") && !j.at("norm_radius").is_null())
        c.norm_radius = j.at("norm_radius").get<double>();
    if (j.contains("clip") && !j.at("clip").is_null()) c.clip = j.at("clip").get<double>();
    c.validate();
}

inline void to_json(json& j, const FInfoEstimate& e) {
    j = json{{"point_estimate", e.point_estimate},
             {"h_marginal", e.h_marginal},
             {"h_conditional", e.h_conditional},
             {"sample_count", e.sample_count},
             {"clamped_nonnegative", e.clamped_nonnegative},
             {"converged", e.converged},
             {"holdout", e.holdout},
             {"units", "nats"}};
    if (e.pac)
        j["pac"] = json{{"delta", e.pac->delta},
                        {"half_width", e.pac->half_width},
                        {"bound_kind", to_string(e.pac->kind)}};
}

inline void to_json(json& j, const SimulationConfig& c) {
    j = json{{"scenario", to_string(c.scenario)},
             {"m", c.node_count()},
             {"d", c.d},
             {"n", c.n},
             {"seed", c.seed},
             {"exponential", c.exponential == ExponentialParam::rate ? "rate" : "mean"},
             {"exponential_noise_rate", c.exponential_noise_rate}};
    if (c.scenario == Scenario::gaussian_pair) {
        j["rho"] = c.rho;
        j["var_y"] = c.var_y;
    }
    if (c.scenario == Scenario::custom_tree) {
        j["parents"] = c.parents;
        j["noise_variance"] = c.noise_variance;
    }
}

/// Reads a simulation config. `seed` is left untouched when absent so the
/// caller can apply a default.
inline void from_json(const json& j, SimulationConfig& c) {
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario").get<std::string>());
    detail::read_optional(j, "m", c.m);
    detail::read_optional(j, "d", c.d);
    detail::read_optional(j, "n", c.n);
    detail::read_optional(j, "seed", c.seed);
    if (j.contains("exponential")) {
        const auto e = j.at("exponential").get<std::string>();
        if (e == "rate") c.exponential = ExponentialParam::rate;
        else if (e == "mean") c.exponential = ExponentialParam::mean;
        else throw UsageError("exponential must be 'rate' or 'mean'");
    }
    detail::read_optional(j, "exponential_noise_rate", c.exponential_noise_rate);
    detail::read_optional(j, "rho", c.rho);
    detail::read_optional(j, "var_y", c.var_y);
    detail::read_optional(j, "parents", c.parents);
    detail::read_optional(j, "noise_variance", c.noise_variance);
}

inline void to_json(json& j, const GroundTruth& g) {
    json laws = json::array();
    for (auto l : g.law) laws.push_back(to_string(l));
    json mixing = json::array();
    for (const auto& w : g.mixing) mixing.push_back(w.size() ? detail::matrix_to_json(w) : json(nullptr));
    j = json{{"tree", g.tree}, {"law", laws}, {"mixing", mixing}, {"noise_variance", g.noise_variance}};
}

}  // namespace finfo
