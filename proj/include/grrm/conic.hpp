#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <string>
#include <vector>

namespace grrm::conic {

/// Cone K = R^l_+ × Q^{q_1} × … × Q^{q_k}, nonnegative block first.
struct ConeDims {
    std::size_t nonneg = 0;
    std::vector<std::size_t> soc;

    std::size_t total() const;
    /// Barrier degree: l + number of second-order cones.
    std::size_t degree() const { return nonneg + soc.size(); }
};

/// minimize c'x  subject to  A x = b,  h − G x ∈ K.
struct Program {
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    ConeDims cones;

    std::size_t variables() const { return static_cast<std::size_t>(c.size()); }
    void validate() const;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, IterationLimit, NumericalError };

const char* status_name(Status s);

struct Settings {
    double feasibility_tol = 1e-10;
    double gap_abs_tol = 1e-10;
    double gap_rel_tol = 1e-10;
    int max_iterations = 150;
    /// Thresholds for the a-posteriori certificate.
    double certify_primal_tol = 1e-8;
    double certify_dual_tol = 1e-6;
    double certify_gap_tol = 1e-6;
};

/// Residuals recomputed from the returned point, independent of the
/// iteration's internal bookkeeping.
struct Certificate {
    double primal_equality = 0.0;  ///< ‖Ax − b‖∞
    double primal_cone = 0.0;      ///< distance of h − Gx outside K
    double dual_residual = 0.0;    ///< ‖A'y + G'z + c‖∞
    double dual_cone = 0.0;        ///< distance of z outside K
    double gap = 0.0;              ///< |c'x + b'y + h'z|
    bool certified = false;
};

struct Result {
    Status status = Status::NumericalError;
    Eigen::VectorXd x, y, z, s;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
    Certificate certificate;
};

/// Primal-dual interior point method on the homogeneous self-dual
/// embedding with Nesterov-Todd scaling and Mehrotra correction.
/// Redundant equality rows are removed up front; inconsistent ones make
/// the program primal infeasible.
Result solve(const Program& program, const Settings& settings = {});

Certificate certify(const Program& program, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& z, const Settings& settings = {});

namespace detail {

/// Nesterov-Todd scaling of one second-order cone: W z = W⁻¹ s = λ.
struct SocScaling {
    double eta = 1.0;
    double a = 1.0;
    Eigen::VectorXd q;

    static SocScaling compute(const Eigen::VectorXd& s, const Eigen::VectorXd& z);
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd inverse_matrix() const;
};

/// Largest α with u + α d in the cone, capped at `cap`.
double max_step(const Eigen::VectorXd& u, const Eigen::VectorXd& d, const ConeDims& cones, double cap);

}  // namespace detail

}  // namespace grrm::conic
