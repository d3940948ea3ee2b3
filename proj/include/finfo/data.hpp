#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <initializer_list>
#include <vector>

#include "finfo/error.hpp"

namespace finfo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Sample space of one variable: R^dim or {0, ..., cardinality-1}.
class VariableSpec {
public:
    enum class Kind { real, categorical };

    static VariableSpec real(int dim) {
        if (dim < 1) throw UsageError("real variable needs dim >= 1, got " + std::to_string(dim));
        return VariableSpec(Kind::real, dim);
    }
    static VariableSpec categorical(int cardinality) {
        if (cardinality < 2)
            throw UsageError("categorical variable needs cardinality >= 2, got " +
                             std::to_string(cardinality));
        return VariableSpec(Kind::categorical, cardinality);
    }

    Kind kind() const noexcept { return kind_; }
    bool is_real() const noexcept { return kind_ == Kind::real; }
    bool is_categorical() const noexcept { return kind_ == Kind::categorical; }

    /// Number of columns a sample occupies (1 for categorical).
    int columns() const noexcept { return is_real() ? size_ : 1; }
    int dim() const noexcept { return is_real() ? size_ : 1; }
    int cardinality() const noexcept { return is_categorical() ? size_ : 0; }

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;

private:
    VariableSpec(Kind kind, int size) : kind_(kind), size_(size) {}
    Kind kind_;
    int size_;
};

/// N samples of one variable, one row per sample. Categorical symbols are
/// stored as integral doubles in a single column.
struct Samples {
    VariableSpec spec = VariableSpec::real(1);
    Matrix values;

    Eigen::Index size() const noexcept { return values.rows(); }
    int symbol(Eigen::Index row) const { return static_cast<int>(values(row, 0)); }
};

inline void validate(const Samples& s, const std::string& what = "samples") {
    if (s.values.cols() != s.spec.columns())
        throw DataError(what + ": expected " + std::to_string(s.spec.columns()) +
                        " columns, got " + std::to_string(s.values.cols()));
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
        for (Eigen::Index k = 0; k < s.values.cols(); ++k) {
            const double v = s.values(i, k);
            if (!std::isfinite(v))
                throw DataError(what + ": non-finite value at row " + std::to_string(i));
            if (s.spec.is_categorical() &&
                (v < 0 || v >= s.spec.cardinality() || v != std::floor(v)))
                throw DataError(what + ": categorical symbol " + std::to_string(v) +
                                " out of range at row " + std::to_string(i));
        }
    }
}

inline Samples real_samples(Matrix values) {
    Samples s{VariableSpec::real(static_cast<int>(values.cols())), std::move(values)};
    validate(s);
    return s;
}

inline Samples real_samples(const std::vector<double>& scalars) {
    Matrix m(static_cast<Eigen::Index>(scalars.size()), 1);
    for (std::size_t i = 0; i < scalars.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = scalars[i];
    return real_samples(std::move(m));
}

inline Samples real_samples(std::initializer_list<double> scalars) {
    return real_samples(std::vector<double>(scalars));
}

inline Samples categorical_samples(const std::vector<int>& symbols, int cardinality) {
    Samples s{VariableSpec::categorical(cardinality),
              Matrix(static_cast<Eigen::Index>(symbols.size()), 1)};
    for (std::size_t i = 0; i < symbols.size(); ++i)
        s.values(static_cast<Eigen::Index>(i), 0) = symbols[i];
    validate(s);
    return s;
}

/// Row subset, preserving the spec.
inline Samples take_rows(const Samples& s, const std::vector<Eigen::Index>& rows) {
    Samples out{s.spec, Matrix(static_cast<Eigen::Index>(rows.size()), s.values.cols())};
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) = s.values.row(rows[i]);
    return out;
}

/// m variables observed on the same N samples.
struct Dataset {
    std::vector<Samples> variables;

    std::size_t variable_count() const noexcept { return variables.size(); }
    Eigen::Index sample_count() const noexcept {
        return variables.empty() ? 0 : variables.front().size();
    }
};

inline void validate(const Dataset& d) {
    for (std::size_t i = 0; i < d.variables.size(); ++i) {
        validate(d.variables[i], "variable " + std::to_string(i));
        if (d.variables[i].size() != d.sample_count())
            throw DataError("variable " + std::to_string(i) + " has " +
                            std::to_string(d.variables[i].size()) + " samples, expected " +
                            std::to_string(d.sample_count()));
    }
}

}  // namespace finfo
