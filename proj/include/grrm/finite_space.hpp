#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace grrm {

class Transition;

/// Tolerance for unit-sum and nonnegativity of probability vectors.
inline constexpr double kMassTolerance = 1e-12;
/// Unit-sum tolerance for signed measures.
inline constexpr double kSignedMassTolerance = 1e-9;

/// Ordered finite support set. Elements are symbolic labels with a fixed
/// order; product spaces record their factors and enumerate tuples in
/// lexicographic order (first factor most significant).
///
/// Copies are cheap and share the immutable element table.
class FiniteSpace {
public:
    FiniteSpace() = default;

    static FiniteSpace make(std::vector<std::string> elements);
    static FiniteSpace product(std::span<const FiniteSpace> factors);

    std::size_t size() const noexcept { return impl_ ? impl_->elements.size() : 0; }
    bool empty() const noexcept { return size() == 0; }

    const std::string& element(std::size_t i) const { return impl_->elements.at(i); }
    const std::vector<std::string>& elements() const { return impl_->elements; }

    /// Index of an element label; throws std::out_of_range if absent.
    std::size_t index_of(const std::string& label) const;
    bool contains(const std::string& label) const;

    bool factorized() const noexcept { return impl_ && !impl_->factors.empty(); }
    std::size_t factor_count() const noexcept { return impl_ ? impl_->factors.size() : 0; }
    const FiniteSpace& factor(std::size_t k) const { return impl_->factors.at(k); }
    const std::vector<FiniteSpace>& factors() const { return impl_->factors; }

    /// Factor indices of a flat index (mixed radix, lexicographic).
    std::vector<std::size_t> decompose(std::size_t flat) const;
    /// Flat index of a tuple of factor indices.
    std::size_t compose(std::span<const std::size_t> parts) const;

    friend bool operator==(const FiniteSpace& a, const FiniteSpace& b);

private:
    struct Impl {
        std::vector<std::string> elements;
        std::unordered_map<std::string, std::size_t> index;
        std::vector<FiniteSpace> factors;
    };
    std::shared_ptr<const Impl> impl_;
};

FiniteSpace make_space(std::vector<std::string> elements);
FiniteSpace product_space(const FiniteSpace& v, const FiniteSpace& w);
FiniteSpace product_space(std::span<const FiniteSpace> factors);

/// Probability vector over a FiniteSpace.
class Distribution {
public:
    Distribution(FiniteSpace space, Eigen::VectorXd mass);

    static Distribution uniform(const FiniteSpace& space);
    static Distribution point(const FiniteSpace& space, std::size_t index);

    const FiniteSpace& space() const noexcept { return space_; }
    const Eigen::VectorXd& mass() const noexcept { return mass_; }
    double operator[](std::size_t i) const { return mass_(static_cast<Eigen::Index>(i)); }
    std::size_t size() const noexcept { return space_.size(); }

private:
    FiniteSpace space_;
    Eigen::VectorXd mass_;
};

/// Normalized but possibly negative measure; produced by the ERM
/// back-projection diagnostic.
class SignedMeasure {
public:
    SignedMeasure(FiniteSpace space, Eigen::VectorXd mass);

    const FiniteSpace& space() const noexcept { return space_; }
    const Eigen::VectorXd& mass() const noexcept { return mass_; }
    double operator[](std::size_t i) const { return mass_(static_cast<Eigen::Index>(i)); }

private:
    FiniteSpace space_;
    Eigen::VectorXd mass_;
};

/// L(predicted, true) over two label spaces.
class LossMatrix {
public:
    LossMatrix(FiniteSpace predicted, FiniteSpace truth, Eigen::MatrixXd values);

    static LossMatrix zero_one(const FiniteSpace& labels);

    const FiniteSpace& predicted_space() const noexcept { return predicted_; }
    const FiniteSpace& true_space() const noexcept { return truth_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(std::size_t predicted, std::size_t truth) const {
        return values_(static_cast<Eigen::Index>(predicted), static_cast<Eigen::Index>(truth));
    }

private:
    FiniteSpace predicted_;
    FiniteSpace truth_;
    Eigen::MatrixXd values_;
};

Distribution empirical_distribution(std::span<const std::size_t> samples, const FiniteSpace& space);
Distribution empirical_distribution(std::span<const std::string> samples, const FiniteSpace& space);

/// Marginal over one factor of a factorized space.
Distribution marginal(const Distribution& q, std::size_t component);

enum class ZeroMassRow { Uniform, Fail };

/// T_{target|given}: row v holds q(target | given = v). Rows with zero
/// marginal mass follow `fallback`.
Transition conditional(const Distribution& q, std::size_t target, std::size_t given,
                       ZeroMassRow fallback = ZeroMassRow::Uniform);

/// Σ_{x,y} q(x,y) L(rule(x), y) for q over a features × labels space.
/// `rule[x]` is an index into the loss's predicted space.
double expected_loss(const Distribution& q, std::span<const std::size_t> rule, const LossMatrix& loss);

}  // namespace grrm
