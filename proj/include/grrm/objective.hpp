#pragma once

#include "grrm/finite_space.hpp"

#include <optional>
#include <string_view>

namespace grrm {

/// t(·): one real k-vector per element of `space` (row-major by element).
class Statistic {
public:
    Statistic(FiniteSpace space, Eigen::MatrixXd values);

    const FiniteSpace& space() const noexcept { return space_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }

private:
    FiniteSpace space_;
    Eigen::MatrixXd values_;
};

enum class NormKind { MaxAbs, SumAbs, Euclidean };

NormKind parse_norm(std::string_view name);
std::string_view norm_name(NormKind kind);
double norm(const Eigen::VectorXd& v, NormKind kind);

/// 1 - Σ_x max_y q(x,y).
double zero_one_entropy(const Distribution& q);
/// Σ_x min_ŷ Σ_y L(ŷ,y) q(x,y): the Bayes risk over all deterministic rules.
double general_entropy(const Distribution& q, const LossMatrix& loss);

Eigen::VectorXd statistic_mean(const Distribution& q, const Statistic& t);
Eigen::VectorXd statistic_mean(const Eigen::VectorXd& mass, const Statistic& t);

/// ‖E_{q1} t − E_{q2} t‖ in the chosen norm.
double discrepancy(const Distribution& q1, const Distribution& q2, const Statistic& t, NormKind kind);

/// Identity rows: t(e) is the indicator vector of e.
Statistic indicator_statistic(const FiniteSpace& space);

/// One-hot feature embedding: concatenated one-hot codes of each factor of
/// a factorized feature space, or a single one-hot code otherwise.
Eigen::MatrixXd one_hot_embedding(const FiniteSpace& features);

/// t(x,y) = (θ−(y), θ−(y)·x, θ+(y), θ+(y)·x) over features × binary labels,
/// with x given by `embedding` (one row per feature). Defaults to
/// one_hot_embedding of the feature factor.
Statistic one_hot_statistic(const FiniteSpace& space, const std::optional<Eigen::MatrixXd>& embedding = std::nullopt);

}  // namespace grrm
