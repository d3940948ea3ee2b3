#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "finfo/auc.hpp"
#include "finfo/csv.hpp"
#include "finfo/edge_weights.hpp"
#include "finfo/finfo.hpp"
#include "finfo/json.hpp"

#ifndef FINFO_VERSION
#define FINFO_VERSION "0.0.0"
#endif

namespace finfo::cli {
namespace {

// ---------------------------------------------------------------------------
// Options. Every flag mirrors a JSON config key: --norm-radius <-> "norm_radius".

enum class Kind { integer, real, text, flag, int_list, text_list };

struct OptionSpec {
    const char* key;
    Kind kind;
    const char* help;
};

using Group = std::vector<OptionSpec>;

const Group kSimulationOptions = {
    {"scenario", Kind::text, "sim1..sim6, gaussian_pair or custom_tree"},
    {"m", Kind::integer, "number of variables (0: scenario default)"},
    {"d", Kind::integer, "dimension of every variable"},
    {"n", Kind::integer, "number of samples"},
    {"seed", Kind::integer, "random seed (default: $USABLE_INFO_SEED)"},
    {"exponential", Kind::text, "read E(v) as a 'rate' or a 'mean'"},
    {"exponential_noise_rate", Kind::real, "rate of the exponential noise term"},
    {"rho", Kind::real, "gaussian_pair correlation"},
    {"var_y", Kind::real, "gaussian_pair target variance"},
    {"parents", Kind::int_list, "custom_tree parent list, -1 marks the root"},
    {"noise_variance", Kind::real, "custom_tree Gaussian noise variance"},
};

const Group kFamilyOptions = {
    {"family", Kind::text,
     "tabular, gaussian_mean, laplace_mean, linear_gaussian, polynomial_gaussian, "
     "categorical_softmax, or auto (per pair, by variable type)"},
    {"order", Kind::integer, "polynomial order"},
    {"fit_mode", Kind::text, "closed_form or gradient"},
    {"max_iters", Kind::integer, "gradient iteration limit"},
    {"step_size", Kind::real, "gradient step size (0: 1/L)"},
    {"tolerance", Kind::real, "gradient convergence tolerance"},
    {"norm_radius", Kind::real, "spectral-norm bound on (W, b)"},
    {"clip", Kind::real, "clamp log-densities to [-B, B]"},
};

const Group kPacOptions = {
    {"pac", Kind::flag, "attach a PAC half-width"},
    {"delta", Kind::real, "PAC confidence parameter (default 0.1)"},
    {"kx", Kind::real, "bound on |x| for the closed-form linear-Gaussian bound"},
    {"ky", Kind::real, "bound on |y| for the closed-form linear-Gaussian bound"},
    {"rademacher", Kind::real, "Rademacher complexity bound for the generic bound"},
    {"B", Kind::real, "log-density bound for the generic bound (default: --clip)"},
};

const Group kCriticOptions = {
    {"critic", Kind::text, "bilinear or quadratic"},
    {"objective", Kind::text, "cpc or nwj"},
    {"batch_size", Kind::integer, "CPC batch size N (default 8)"},
    {"batches_per_step", Kind::integer, "batches per gradient step (default 16)"},
    {"iterations", Kind::integer, "Adam steps (default 300)"},
    {"learning_rate", Kind::real, "Adam step size (default 0.01)"},
    {"cap", Kind::real, "critic output cap (default 50)"},
};

const Group kTreeOutputOptions = {
    {"truth", Kind::text, "ground-truth tree JSON"},
    {"directed", Kind::flag, "compare edges with direction"},
    {"scores_out", Kind::text, "write edge scores as source,target,score CSV"},
    {"jobs", Kind::integer, "worker threads"},
};

std::string flag_name(const std::string& key) {
    std::string s = key;
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(s);
    while (std::getline(in, field, sep))
        if (!trim(field).empty()) out.push_back(trim(field));
    return out;
}

long long parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        throw UsageError(flag_name(key) + ": '" + t + "' is not an integer");
    return v;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw UsageError(flag_name(key) + ": '" + t + "' is not a number");
    return v;
}

json convert(const OptionSpec& spec, const std::string& text) {
    switch (spec.kind) {
        case Kind::integer: return parse_integer(spec.key, text);
        case Kind::real: return parse_double(spec.key, text);
        case Kind::text: return text;
        case Kind::flag: return true;
        case Kind::int_list: {
            json arr = json::array();
            for (const auto& f : split(text)) arr.push_back(parse_integer(spec.key, f));
            return arr;
        }
        case Kind::text_list: {
            json arr = json::array();
            for (const auto& f : split(text)) arr.push_back(f);
            return arr;
        }
    }
    return nullptr;
}

struct Outcome {
    json result;
    int exit_code = 0;
    std::string message;
};

struct Command;
using Handler = std::function<Outcome(Command&, json&)>;

struct Command {
    CLI::App* app = nullptr;
    std::string name;
    std::vector<OptionSpec> specs;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    Handler handler;

    void add(const Group& group) {
        for (const auto& spec : group) {
            specs.push_back(spec);
            if (spec.kind == Kind::flag)
                options[spec.key] = app->add_flag(flag_name(spec.key), flags[spec.key], spec.help);
            else
                options[spec.key] = app->add_option(flag_name(spec.key), values[spec.key], spec.help);
        }
    }

    /// Config file values overlaid with the flags given on the command line.
    json effective() const {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("cannot open config file '" + config_path + "'");
            try {
                cfg = json::parse(in);
            } catch (const json::exception& e) {
                throw UsageError("config file '" + config_path + "' is not valid JSON: " + e.what());
            }
            if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
            for (const auto& [key, _] : cfg.items())
                if (std::none_of(specs.begin(), specs.end(),
                                 [&](const OptionSpec& s) { return key == s.key; }))
                    throw UsageError("unknown config key '" + key + "' for command " + name);
        }
        for (const auto& spec : specs) {
            if (options.at(spec.key)->count() == 0) continue;
            cfg[spec.key] = spec.kind == Kind::flag ? json(true) : convert(spec, values.at(spec.key));
        }
        return cfg;
    }
};

// ---------------------------------------------------------------------------
// Config access

bool has(const json& cfg, const char* key) { return cfg.contains(key) && !cfg.at(key).is_null(); }

template <typename T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!has(cfg, key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::string require_text(const json& cfg, const char* key) {
    if (!has(cfg, key)) throw UsageError(flag_name(key) + " is required");
    return get_or<std::string>(cfg, key, "");
}

/// A string list given either as a JSON array or a comma-separated string.
std::vector<std::string> text_list(const json& cfg, const char* key) {
    if (!has(cfg, key)) return {};
    const json& v = cfg.at(key);
    if (v.is_string()) return split(v.get<std::string>());
    if (!v.is_array()) throw UsageError(std::string("config key '") + key + "' must be a list");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw UsageError(std::string("config key '") + key + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::vector<long long> int_list(const json& cfg, const char* key) {
    if (!has(cfg, key)) return {};
    const json& v = cfg.at(key);
    if (v.is_string()) {
        std::vector<long long> out;
        for (const auto& f : split(v.get<std::string>())) out.push_back(parse_integer(key, f));
        return out;
    }
    return get_or<std::vector<long long>>(cfg, key, {});
}

/// Seed from the config or flags, else $USABLE_INFO_SEED. Written back into
/// the config so the echo records it.
std::uint64_t resolve_seed(json& cfg) {
    if (has(cfg, "seed")) {
        const auto seed = get_or<long long>(cfg, "seed", 0);
        if (seed < 0) throw UsageError("seed must be non-negative");
        return std::uint64_t(seed);
    }
    if (const char* env = std::getenv("USABLE_INFO_SEED"); env && *env) {
        const long long seed = parse_integer("seed", env);
        if (seed < 0) throw UsageError("USABLE_INFO_SEED must be non-negative");
        cfg["seed"] = seed;
        return std::uint64_t(seed);
    }
    throw UsageError("no seed given: pass --seed, set \"seed\" in the config file, or set USABLE_INFO_SEED");
}

int jobs_of(const json& cfg) {
    const int jobs = get_or<int>(cfg, "jobs", 1);
    if (jobs < 1) throw UsageError("--jobs must be >= 1");
    return jobs;
}

SimulationConfig simulation_config(json& cfg) {
    SimulationConfig sc;
    const std::uint64_t seed = resolve_seed(cfg);
    try {
        from_json(cfg, sc);
    } catch (const json::exception&) {
        throw UsageError("simulation config has a value of the wrong type");
    }
    sc.seed = seed;
    sc.validate();
    return sc;
}

/// Family config from the config keys; "auto" is resolved per pair by the caller.
FamilyConfig family_config(const json& cfg, std::optional<FamilyKind> kind = std::nullopt) {
    json j = cfg;
    if (kind) j["family"] = to_string(*kind);
    if (!has(j, "family")) j["family"] = "linear_gaussian";
    try {
        return j.get<FamilyConfig>();
    } catch (const json::exception&) {
        throw UsageError("family config has a value of the wrong type");
    }
}

bool auto_family(const json& cfg) { return get_or<std::string>(cfg, "family", "") == "auto"; }

FamilyKind auto_kind(const VariableSpec& x, const VariableSpec& y) {
    if (y.is_categorical())
        return x.is_categorical() ? FamilyKind::tabular : FamilyKind::categorical_softmax;
    return FamilyKind::linear_gaussian;
}

FamilySelector family_selector(const json& cfg, const Dataset& data) {
    if (!auto_family(cfg)) {
        const FamilyConfig fixed = family_config(cfg);
        return [fixed](int, int) { return fixed; };
    }
    return [cfg, &data](int i, int j) {
        return family_config(cfg, auto_kind(data.variables[std::size_t(i)].spec,
                                            data.variables[std::size_t(j)].spec));
    };
}

BatchSpec batch_spec(const json& cfg, std::uint64_t seed) {
    BatchSpec spec;
    spec.batch_size = get_or<int>(cfg, "batch_size", spec.batch_size);
    spec.batches_per_step = get_or<int>(cfg, "batches_per_step", spec.batches_per_step);
    spec.iterations = get_or<int>(cfg, "iterations", spec.iterations);
    spec.step_size = get_or<double>(cfg, "learning_rate", spec.step_size);
    spec.cap = get_or<double>(cfg, "cap", spec.cap);
    spec.seed = seed;
    spec.validate();
    return spec;
}

json batch_spec_json(const BatchSpec& s) {
    return json{{"optimizer", "adam"},
                {"batch_size", s.batch_size},
                {"batches_per_step", s.batches_per_step},
                {"iterations", s.iterations},
                {"learning_rate", s.step_size},
                {"cap", s.cap},
                {"seed", s.seed}};
}

// ---------------------------------------------------------------------------
// Files

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");
    try {
        return read_dataset_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
}

/// A tree from a JSON file holding either the tree itself, {"tree": ...},
/// or a simulate/tree run record.
Arborescence load_tree(const std::string& path) {
    json j = load_json(path);
    for (const char* key : {"result", "truth", "tree"})
        if (j.is_object() && !j.contains("parents") && j.contains(key)) j = j.at(key);
    try {
        return j.get<Arborescence>();
    } catch (const json::exception& e) {
        throw DataError(path + ": not a tree: " + e.what());
    }
}

/// Undirected 0/1 adjacency of a tree's skeleton.
Matrix skeleton(const Arborescence& t) {
    Matrix a = Matrix::Zero(t.size(), t.size());
    for (auto [p, c] : t.edges()) a(p, c) = a(c, p) = 1.0;
    return a;
}

void write_adjacency_csv(std::ostream& out, const Matrix& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out << (j ? "," : "") << a(i, j);
        out << '\n';
    }
}

Matrix read_adjacency_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open truth file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        std::vector<double> row;
        const auto fields = split_csv_line(trim(line));
        for (std::size_t c = 0; c < fields.size(); ++c) row.push_back(parse_real(fields[c], line_no, c + 1));
        rows.push_back(std::move(row));
    }
    const auto m = Eigen::Index(rows.size());
    Matrix a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (Eigen::Index(rows[std::size_t(i)].size()) != m)
            throw DataError(path + ": adjacency matrix must be square");
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rows[std::size_t(i)][std::size_t(j)];
    }
    return a;
}

void write_scores_csv(std::ostream& out, const EdgeWeightMatrix& w) {
    out << "source,target,score\n";
    for (int i = 0; i < w.size(); ++i)
        for (int j = 0; j < w.size(); ++j)
            if (i != j) out << i << ',' << j << ',' << format_real(w.w(i, j)) << '\n';
}

Matrix read_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scores file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "source,target,score")
        throw DataError(path + ": line 1: expected header source,target,score");
    std::vector<std::tuple<long, long, double>> entries;
    long m = 0;
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(trim(line));
        if (f.size() != 3)
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected 3 fields");
        const double s = parse_real(f[0], line_no, 1), t = parse_real(f[1], line_no, 2);
        if (s < 0 || t < 0 || s != double(long(s)) || t != double(long(t)) || s == t)
            throw DataError(path + ": line " + std::to_string(line_no) +
                            ": source and target must be distinct non-negative integers");
        entries.emplace_back(long(s), long(t), parse_real(f[2], line_no, 3));
        m = std::max({m, long(s) + 1, long(t) + 1});
    }
    Matrix scores = Matrix::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
    for (auto [s, t, v] : entries) {
        if (!std::isnan(scores(s, t)))
            throw DataError(path + ": duplicate score for " + std::to_string(s) + " -> " + std::to_string(t));
        scores(s, t) = v;
    }
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j && std::isnan(scores(i, j)))
                throw DataError(path + ": missing score for " + std::to_string(i) + " -> " + std::to_string(j));
    scores.diagonal().setZero();
    return scores;
}

// ---------------------------------------------------------------------------
// Commands

/// Data for tree-style commands: a CSV (--data, optional --truth) or a fresh
/// simulation (--scenario ...), whose generative tree is the truth.
struct Source {
    Dataset data;
    std::optional<Arborescence> truth;
};

Source load_source(json& cfg) {
    Source src;
    if (has(cfg, "data")) {
        if (has(cfg, "scenario")) throw UsageError("give either --data or --scenario, not both");
        src.data = load_dataset(require_text(cfg, "data"));
    } else if (has(cfg, "scenario")) {
        auto [data, truth] = simulate(simulation_config(cfg));
        src.data = std::move(data);
        src.truth = truth.tree;
    } else {
        throw UsageError("give --data <csv> or a simulation (--scenario ...)");
    }
    if (has(cfg, "truth")) src.truth = load_tree(require_text(cfg, "truth"));
    return src;
}

json tree_result(const json& cfg, const EdgeWeightMatrix& w, const std::optional<Arborescence>& truth) {
    const Arborescence tree = max_arborescence(w);
    json result{{"tree", tree}, {"C_hat", tree.total_weight}, {"edge_weights", w}};
    if (truth) {
        const bool directed = get_or<bool>(cfg, "directed", false);
        result["wrong_edges_ratio"] =
            wrong_edges_ratio(tree, *truth, directed ? EdgeComparison::directed : EdgeComparison::undirected);
        result["comparison"] = directed ? "directed" : "undirected";
        result["truth"] = *truth;
    }
    if (has(cfg, "scores_out")) {
        auto out = open_output(require_text(cfg, "scores_out"));
        write_scores_csv(out, w);
    }
    return result;
}

Outcome cmd_simulate(Command&, json& cfg) {
    const SimulationConfig sc = simulation_config(cfg);
    const std::string out_path = require_text(cfg, "out");
    auto [data, truth] = simulate(sc);
    {
        auto out = open_output(out_path);
        write_dataset_csv(out, data);
    }
    const std::string truth_path = get_or<std::string>(cfg, "truth_out", out_path + ".truth.json");
    cfg["truth_out"] = truth_path;
    if (has(cfg, "adjacency_out")) {
        auto out = open_output(require_text(cfg, "adjacency_out"));
        write_adjacency_csv(out, skeleton(truth.tree));
    }
    cfg["simulation"] = sc;
    return {json{{"dataset", out_path},
                 {"variables", data.variable_count()},
                 {"samples", data.sample_count()},
                 {"truth", truth}}};
}

Outcome cmd_estimate(Command&, json& cfg) {
    if (!has(cfg, "x") || !has(cfg, "y")) throw UsageError("--x and --y are required");
    const Dataset data = load_dataset(require_text(cfg, "data"));
    const auto xs = select_columns(data, text_list(cfg, "x"));
    const auto ys = select_columns(data, text_list(cfg, "y"));
    FamilyConfig family = family_config(cfg, auto_family(cfg) ? std::optional(auto_kind(xs.spec, ys.spec))
                                                               : std::nullopt);

    std::optional<PacConfig> pac;
    if (get_or<bool>(cfg, "pac", false)) {
        PacConfig p;
        p.delta = get_or<double>(cfg, "delta", p.delta);
        if (has(cfg, "B")) p.B = get_or<double>(cfg, "B", 0.0);
        if (has(cfg, "rademacher")) p.rademacher_bound = get_or<double>(cfg, "rademacher", 0.0);
        if (has(cfg, "kx")) p.k_x = get_or<double>(cfg, "kx", 0.0);
        if (has(cfg, "ky")) p.k_y = get_or<double>(cfg, "ky", 0.0);
        // The closed-form bound holds inside the unit norm ball; turn the
        // constraint on rather than report a bound that does not apply.
        if ((p.k_x || p.k_y) && family.kind == FamilyKind::linear_gaussian && !family.norm_radius) {
            family.norm_radius = 1.0;
            cfg["norm_radius"] = 1.0;
        }
        pac = p;
    }
    cfg["family"] = to_string(family.kind);

    FInfoEstimate est;
    const double fraction = get_or<double>(cfg, "holdout_fraction", 0.0);
    if (fraction > 0) {
        if (fraction >= 1) throw UsageError("--holdout-fraction must lie in (0, 1)");
        if (pac) throw UsageError("PAC bounds apply to the in-sample estimate only");
        const Eigen::Index n = ys.size();
        const auto test = Eigen::Index(std::round(double(n) * fraction));
        if (test < 1 || test >= n) throw DataError("holdout split leaves an empty part");
        std::vector<Eigen::Index> head, tail;
        for (Eigen::Index i = 0; i < n; ++i) (i < n - test ? head : tail).push_back(i);
        est = holdout_f_information(family, take_rows(xs, head), take_rows(ys, head), take_rows(xs, tail),
                                    take_rows(ys, tail));
    } else {
        est = empirical_f_information(family, xs, ys, pac, get_or<bool>(cfg, "clamp", false));
    }
    Outcome o{json(est)};
    if (!est.converged) {
        o.exit_code = 4;
        o.message = "the iterative fit did not converge within max_iters";
    }
    return o;
}

Outcome cmd_tree(Command&, json& cfg) {
    Source src = load_source(cfg);
    const auto w = edge_weights(src.data, family_selector(cfg, src.data), jobs_of(cfg));
    return {tree_result(cfg, w, src.truth)};
}

Outcome cmd_baselines(Command&, json& cfg) {
    Source src = load_source(cfg);
    const std::uint64_t seed = resolve_seed(cfg);
    const BatchSpec spec = batch_spec(cfg, seed);
    const CriticKind critic = parse_critic_kind(get_or<std::string>(cfg, "critic", "bilinear"));
    const BoundObjective objective = parse_objective(get_or<std::string>(cfg, "objective", "cpc"));
    json meta{{"critic", to_string(critic)}, {"objective", to_string(objective)}, {"training", batch_spec_json(spec)}};
    if (has(cfg, "x") || has(cfg, "y")) {
        const auto xs = select_columns(src.data, text_list(cfg, "x"));
        const auto ys = select_columns(src.data, text_list(cfg, "y"));
        meta["estimate"] = baseline_mutual_information(critic, objective, xs.values, ys.values, spec);
        meta["units"] = "nats";
        return {meta};
    }
    const auto w = baseline_edge_weights(src.data, critic, objective, spec, jobs_of(cfg));
    json result = tree_result(cfg, w, src.truth);
    result.update(meta);
    return {result};
}

/// One sweep column: an F-family or a critic baseline ("cpc:bilinear").
struct SweepFamily {
    std::string label;
    std::optional<FamilyConfig> family;
    CriticKind critic = CriticKind::bilinear;
    BoundObjective objective = BoundObjective::cpc;
};

SweepFamily parse_sweep_family(const json& cfg, const std::string& token) {
    SweepFamily f{token, std::nullopt};
    const auto colon = token.find(':');
    const std::string head = token.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : token.substr(colon + 1);
    if (head == "cpc" || head == "nwj") {
        f.objective = parse_objective(head);
        f.critic = parse_critic_kind(tail.empty() ? "bilinear" : tail);
        return f;
    }
    json j = cfg;
    j["family"] = head;
    if (!tail.empty()) j["order"] = parse_integer("families", tail);
    f.family = family_config(j);
    return f;
}

Outcome cmd_sweep(Command&, json& cfg) {
    const Scenario scenario = parse_scenario(require_text(cfg, "scenario"));
    const std::uint64_t base_seed = resolve_seed(cfg);
    std::vector<long long> sizes = int_list(cfg, "sizes");
    if (sizes.empty()) sizes = {10, 30, 100, 300, 1000, 5000};
    std::vector<long long> seeds = int_list(cfg, "seeds");
    if (seeds.empty()) {
        const int count = get_or<int>(cfg, "num_seeds", 10);
        if (count < 1) throw UsageError("--num-seeds must be >= 1");
        for (int k = 0; k < count; ++k) seeds.push_back((long long)(base_seed) + k);
    }
    std::vector<std::string> tokens = text_list(cfg, "families");
    if (tokens.empty()) tokens = {"linear_gaussian"};
    std::vector<SweepFamily> families;
    for (const auto& t : tokens) families.push_back(parse_sweep_family(cfg, t));
    for (auto n : sizes)
        if (n < 2) throw UsageError("sample sizes must be >= 2");
    for (auto s : seeds)
        if (s < 0) throw UsageError("seeds must be non-negative");
    const bool directed = get_or<bool>(cfg, "directed", false);

    SimulationConfig base = simulation_config(cfg);
    base.scenario = scenario;
    struct Task {
        std::size_t family;
        long long n;
        long long seed;
        double ratio = 0;
        double c_hat = 0;
    };
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < families.size(); ++f)
        for (auto n : sizes)
            for (auto s : seeds) tasks.push_back({f, n, s});
    const BatchSpec defaults = batch_spec(cfg, 0);

    detail::parallel_for(tasks.size(), jobs_of(cfg), [&](std::size_t k) {
        Task& t = tasks[k];
        SimulationConfig sc = base;
        sc.n = t.n;
        sc.seed = std::uint64_t(t.seed);
        const auto [data, truth] = simulate(sc);
        const SweepFamily& fam = families[t.family];
        EdgeWeightMatrix w;
        if (fam.family) {
            w = edge_weights(data, *fam.family, 1);
        } else {
            BatchSpec spec = defaults;
            spec.seed = std::uint64_t(t.seed);
            spec.batch_size = std::min<int>(spec.batch_size, int(t.n));
            w = baseline_edge_weights(data, fam.critic, fam.objective, spec, 1);
        }
        const Arborescence tree = max_arborescence(w);
        t.ratio = wrong_edges_ratio(tree, truth.tree, directed ? EdgeComparison::directed : EdgeComparison::undirected);
        t.c_hat = tree.total_weight;
    });

    std::sort(tasks.begin(), tasks.end(), [&](const Task& a, const Task& b) {
        return std::tie(families[a.family].label, a.n, a.seed) < std::tie(families[b.family].label, b.n, b.seed);
    });
    std::ostringstream csv;
    csv << "scenario,family,N,seed,wrong_edges_ratio,C_hat\n";
    for (const auto& t : tasks)
        csv << to_string(scenario) << ',' << families[t.family].label << ',' << t.n << ',' << t.seed << ','
            << format_real(t.ratio) << ',' << format_real(t.c_hat) << '\n';
    cfg["sizes"] = sizes;
    cfg["seeds"] = seeds;
    cfg["families"] = tokens;
    return {json{{"rows", tasks.size()}, {"csv", csv.str()}}};
}

Outcome cmd_auc(Command&, json& cfg) {
    const Matrix scores = read_scores_csv(require_text(cfg, "scores"));
    const std::string truth_path = require_text(cfg, "truth");
    const bool tree_truth = truth_path.size() >= 5 && truth_path.substr(truth_path.size() - 5) == ".json";
    const Matrix truth = tree_truth ? skeleton(load_tree(truth_path)) : read_adjacency_csv(truth_path);
    if (truth.rows() != scores.rows())
        throw DataError("scores cover " + std::to_string(scores.rows()) + " nodes, truth has " +
                        std::to_string(truth.rows()));
    Eigen::Index positives = 0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i)
        for (Eigen::Index j = 0; j < truth.cols(); ++j) positives += (i != j && truth(i, j) == 1.0);
    const Eigen::Index pairs = truth.rows() * (truth.rows() - 1);
    return {json{{"auc", edge_auc(scores, truth)}, {"positives", positives}, {"negatives", pairs - positives}}};
}

json run_record(const std::string& command, const json& cfg, double seconds, const json& result) {
    return json{{"command", command},
                {"config", cfg},
                {"seed", cfg.contains("seed") ? cfg.at("seed") : json(nullptr)},
                {"duration_seconds", seconds},
                {"version", FINFO_VERSION},
                {"result", result}};
}

void emit(const std::string& command, const json& cfg, const json& record, std::ostream& out) {
    if (command == "sweep") {
        // CSV with the run record (minus the rows) as a leading comment line.
        json header = record;
        const std::string body = header["result"]["csv"].get<std::string>();
        header["result"].erase("csv");
        const std::string text = "# config: " + header.dump() + "\n" + body;
        if (has(cfg, "out")) open_output(cfg.at("out").get<std::string>()) << text;
        else out << text;
        return;
    }
    if (command == "simulate") {
        open_output(cfg.at("truth_out").get<std::string>()) << record.dump(2) << '\n';
        out << record.dump(2) << '\n';
        return;
    }
    if (has(cfg, "out")) open_output(cfg.at("out").get<std::string>()) << record.dump(2) << '\n';
    else out << record.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"F-information estimation and Chow-Liu tree learning", "finfo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FINFO_VERSION);

    std::vector<std::unique_ptr<Command>> commands;
    auto make = [&](const char* name, const char* description, std::vector<Group> groups, Handler handler) {
        auto cmd = std::make_unique<Command>();
        cmd->name = name;
        cmd->app = app.add_subcommand(name, description);
        cmd->app->add_option("--config", cmd->config_path, "JSON config; flags override its keys");
        for (const auto& g : groups) cmd->add(g);
        cmd->handler = std::move(handler);
        commands.push_back(std::move(cmd));
    };

    make("simulate", "draw a synthetic dataset and its ground-truth tree",
         {kSimulationOptions,
          {{"out", Kind::text, "dataset CSV path (required)"},
           {"truth_out", Kind::text, "ground-truth JSON path (default <out>.truth.json)"},
           {"adjacency_out", Kind::text, "write the true skeleton as a 0/1 adjacency CSV"}}},
         cmd_simulate);
    make("estimate", "empirical F-information between column groups of a dataset",
         {{{"data", Kind::text, "dataset CSV (required)"},
           {"x", Kind::text_list, "side-information columns: var<i> or var<i>_<k>, comma separated"},
           {"y", Kind::text_list, "target columns"},
           {"clamp", Kind::flag, "clamp negative estimates to 0"},
           {"holdout_fraction", Kind::real, "score on the trailing fraction of rows, fit on the rest"},
           {"out", Kind::text, "write the JSON record here instead of stdout"}},
          kFamilyOptions, kPacOptions},
         cmd_estimate);
    make("tree", "learn a Chow-Liu tree from F-information edge weights",
         {{{"data", Kind::text, "dataset CSV"}, {"out", Kind::text, "write the JSON record here"}},
          kTreeOutputOptions, kSimulationOptions, kFamilyOptions},
         cmd_tree);
    make("baselines", "variational MI baselines (CPC, NWJ) for one pair or a whole tree",
         {{{"data", Kind::text, "dataset CSV"},
           {"x", Kind::text_list, "pair mode: side-information columns"},
           {"y", Kind::text_list, "pair mode: target columns"},
           {"out", Kind::text, "write the JSON record here"}},
          kTreeOutputOptions, kSimulationOptions, kCriticOptions},
         cmd_baselines);
    make("sweep", "wrong-edges ratio over sample sizes, seeds and families",
         {kSimulationOptions, kCriticOptions,
          {{"sizes", Kind::int_list, "sample sizes (default 10,30,100,300,1000,5000)"},
           {"seeds", Kind::int_list, "explicit seed list"},
           {"num_seeds", Kind::integer, "number of seeds from --seed upward (default 10)"},
           {"families", Kind::text_list,
            "families: F-family names (polynomial_gaussian:<order>) or cpc:<critic> / nwj:<critic>"},
           {"directed", Kind::flag, "compare edges with direction"},
           {"jobs", Kind::integer, "worker threads"},
           {"out", Kind::text, "CSV path (default stdout)"}},
          {kFamilyOptions.begin() + 2, kFamilyOptions.end()}},
         cmd_sweep);
    make("auc", "ROC AUC of edge scores against a true adjacency",
         {{{"scores", Kind::text, "source,target,score CSV (required)"},
           {"truth", Kind::text, "0/1 adjacency CSV, or a tree JSON (skeleton is used)"},
           {"out", Kind::text, "write the JSON record here"}}},
         cmd_auc);

    std::vector<const char*> argv{"finfo"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Command* cmd = nullptr;
    for (auto& c : commands)
        if (c->app->parsed()) cmd = c.get();
    if (!cmd) return 2;

    const auto start = std::chrono::steady_clock::now();
    try {
        json cfg = cmd->effective();
        Outcome outcome = cmd->handler(*cmd, cfg);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit(cmd->name, cfg, run_record(cmd->name, cfg, seconds, outcome.result), out);
        if (outcome.exit_code != 0) err << "error: " << outcome.message << '\n';
        return outcome.exit_code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << cmd->app->help();
        return e.exit_code();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace finfo::cli
