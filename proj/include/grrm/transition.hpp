#pragma once

#include "grrm/finite_space.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace grrm {

/// Input slack accepted on row sums before renormalization.
inline constexpr double kRowSumSlack = 1e-9;

/// Probabilistic transformation between finite spaces, stored as a dense
/// row-stochastic kernel: rows index the source, columns the target, and
/// apply() maps q to r(w) = Σ_v K(v,w) q(v).
class Transition {
public:
    /// Validates nonnegativity and row sums (within kRowSumSlack), then
    /// renormalizes each row exactly.
    Transition(FiniteSpace source, FiniteSpace target, Eigen::MatrixXd kernel);

    const FiniteSpace& source() const noexcept { return source_; }
    const FiniteSpace& target() const noexcept { return target_; }
    const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }

    bool is_identity(double tol = 0.0) const;

private:
    FiniteSpace source_;
    FiniteSpace target_;
    Eigen::MatrixXd kernel_;
};

Transition identity(const FiniteSpace& space);
Transition from_matrix(const FiniteSpace& source, const FiniteSpace& target, Eigen::MatrixXd kernel);

Distribution apply(const Transition& t, const Distribution& q);
/// Linear extension to signed vectors, no validation.
Eigen::VectorXd apply_linear(const Transition& t, const Eigen::VectorXd& v);

/// t1 then t2: kernel t1·t2.
Transition serial(const Transition& t1, const Transition& t2);
/// t1 ⊗ t2 on product spaces (Kronecker product in lexicographic order).
Transition parallel(const Transition& t1, const Transition& t2);
/// n-fold parallel composition.
Transition parallel(std::span<const Transition> parts);

/// One-hot rows at f(v); `f[v]` is a target index.
Transition deterministic(const FiniteSpace& source, const FiniteSpace& target,
                         std::span<const std::size_t> f);
Transition deterministic(const FiniteSpace& source, const FiniteSpace& target,
                         const std::function<std::size_t(std::size_t)>& f);

/// Row v uniform on the set f(v). Empty sets are rejected.
Transition set_valued(const FiniteSpace& source, const FiniteSpace& target,
                      const std::vector<std::vector<std::size_t>>& f);

/// Kernel [[1-ρ−, ρ−], [ρ+, 1-ρ+]] over labels ordered (−1, +1).
Transition label_noise(double rho_minus, double rho_plus);
Transition label_noise(const FiniteSpace& labels, double rho_minus, double rho_plus);
FiniteSpace binary_labels();

/// Keeps each symbol with probability 1-η and spreads η uniformly over the
/// remaining symbols.
Transition symbol_noise(const FiniteSpace& space, double flip_prob);

/// Deterministic projection of a factorized space onto the listed factors
/// (in the listed order).
Transition projection(const FiniteSpace& space, std::span<const std::size_t> kept);

/// CSV exchange: header row "source,<target elements...>", one row per
/// source element.
void write_kernel_csv(const Transition& t, std::ostream& out);
Transition read_kernel_csv(std::istream& in, const FiniteSpace& source, const FiniteSpace& target);
/// Infers both spaces from the labels in the file.
Transition read_kernel_csv(std::istream& in);

}  // namespace grrm
