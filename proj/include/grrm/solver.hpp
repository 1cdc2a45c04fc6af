#pragma once

#include "grrm/conic.hpp"
#include "grrm/objective.hpp"
#include "grrm/scheme.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grrm {

/// Which test features may carry mass in Q.
enum class FeatureSupport {
    /// Features reachable from some bridge element with positive empirical
    /// image; everything else is fixed at zero.
    Data,
    /// Every feature of the test space.
    Full,
};

struct GrrmProblem {
    SupervisionScheme scheme;
    double lambda = 0.1;
    /// One statistic per triple, over that triple's bridge space.
    std::vector<Statistic> statistics;
    NormKind norm = NormKind::MaxAbs;
    /// Optional pin of Σ_y Q(x,y) to a feature distribution.
    std::optional<Distribution> marginal_pin;
    double tolerance = 1e-6;
    FeatureSupport support = FeatureSupport::Data;

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

/// Indicator statistics on every bridge.
GrrmProblem make_problem(SupervisionScheme scheme, double lambda, NormKind norm = NormKind::MaxAbs);

enum class SolveStatus { Optimal, Infeasible, Unbounded, ToleranceNotMet };
const char* status_name(SolveStatus s);

struct GrrmSolution {
    SolveStatus status = SolveStatus::ToleranceNotMet;
    std::optional<Distribution> q_star;
    std::vector<Distribution> witnesses;
    /// Σ w_i ψ_i(Q*) − λ H(Q*), recomputed from Q*.
    double objective = 0.0;
    /// Optimal value reported by the conic program.
    double program_objective = 0.0;
    std::vector<double> discrepancy_terms;
    double entropy = 0.0;
    /// max_i ‖T_i(Q*) − T̃_i(Q̃_i)‖∞
    double feasibility_residual = 0.0;
    conic::Certificate certificate;
    int iterations = 0;
    std::vector<std::string> warnings;

    bool optimal() const noexcept { return status == SolveStatus::Optimal; }
};

/// Conic program together with the bookkeeping needed to read Q and the
/// witnesses back out of a primal solution.
struct AssembledProgram {
    conic::Program program;
    std::vector<std::string> variable_names;
    /// Test-space index of each Q variable (Q occupies columns [0, q_count)).
    std::vector<std::size_t> q_index;
    std::vector<std::size_t> support_features;
    std::size_t m_offset = 0;
    std::vector<std::size_t> s_offset;
    struct WitnessBlock {
        std::size_t offset = 0;
        /// Training-space members of each compressed witness coordinate.
        std::vector<std::vector<std::size_t>> groups;
    };
    std::vector<WitnessBlock> witnesses;
};

AssembledProgram assemble_program(const GrrmProblem& problem);

GrrmSolution solve(const GrrmProblem& problem, const conic::Settings& settings = {});

/// Robust risk minimization on one empirical distribution, assembled without
/// witness variables.
GrrmSolution solve_rrm(const Distribution& empirical, double lambda, const Statistic& statistic,
                       NormKind norm = NormKind::MaxAbs, const std::optional<LossMatrix>& loss = std::nullopt,
                       const conic::Settings& settings = {});

/// Returns true when the uniform distribution over the test space admits a
/// witness for every triple.
bool uniform_is_feasible(const SupervisionScheme& scheme);

struct UncertaintySpec {
    double radius = 1.0;
};

/// Σ_i w_i ψ(T_i(q), T̃_i(P̃_i)).
double weighted_discrepancy(const Distribution& q, const GrrmProblem& problem);
bool uncertainty_membership(const Distribution& q, const GrrmProblem& problem, const UncertaintySpec& spec);

struct ErmDiagnostic {
    SignedMeasure q;
    std::vector<std::size_t> negative_entries;
    double min_entry = 0.0;
    std::size_t argmin = 0;
};

/// Solves T(Q) = P̃ exactly for a triple with T̃ = identity and T square and
/// invertible.
ErmDiagnostic erm_backprojection(const BridgeTriple& triple);

/// CPLEX LP text. Second-order blocks are written with auxiliary variables
/// and one quadratic constraint each.
void write_lp(const conic::Program& program, const std::vector<std::string>& names, std::ostream& out);

}  // namespace grrm
