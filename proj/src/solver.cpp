#include "grrm/solver.hpp"

#include "grrm/transition.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace grrm {

namespace {

constexpr double kReachTolerance = 1e-15;
constexpr double kClipTolerance = 1e-9;

using Row = std::vector<std::pair<std::size_t, double>>;

/// Accumulates a conic program row by row. Nonnegative-cone rows are kept
/// ahead of second-order blocks as the solver expects.
class Builder {
public:
    std::size_t add_variable(std::string name) {
        names_.push_back(std::move(name));
        return names_.size() - 1;
    }
    std::size_t variables() const { return names_.size(); }

    void add_equality(Row row, double rhs) {
        eq_.push_back(std::move(row));
        b_.push_back(rhs);
    }
    /// row · x ≤ rhs
    void add_inequality(Row row, double rhs) {
        le_.push_back(std::move(row));
        hle_.push_back(rhs);
    }
    /// (h_k − row_k · x)_k in the second-order cone, head first.
    void add_soc(std::vector<Row> rows, std::vector<double> h) {
        soc_.push_back(std::move(rows));
        hsoc_.push_back(std::move(h));
    }
    void add_cost(std::size_t var, double value) { cost_.emplace_back(var, value); }

    conic::Program build() const {
        conic::Program p;
        const auto n = static_cast<Eigen::Index>(names_.size());
        p.c = Eigen::VectorXd::Zero(n);
        for (const auto& [v, val] : cost_) p.c(static_cast<Eigen::Index>(v)) += val;

        std::vector<Eigen::Triplet<double>> ta;
        for (std::size_t r = 0; r < eq_.size(); ++r)
            for (const auto& [v, val] : eq_[r])
                ta.emplace_back(static_cast<int>(r), static_cast<int>(v), val);
        p.A.resize(static_cast<Eigen::Index>(eq_.size()), n);
        p.A.setFromTriplets(ta.begin(), ta.end());
        p.b = Eigen::Map<const Eigen::VectorXd>(b_.data(), static_cast<Eigen::Index>(b_.size()));

        std::vector<Eigen::Triplet<double>> tg;
        std::vector<double> h;
        std::size_t r = 0;
        for (std::size_t k = 0; k < le_.size(); ++k, ++r) {
            for (const auto& [v, val] : le_[k]) tg.emplace_back(static_cast<int>(r), static_cast<int>(v), val);
            h.push_back(hle_[k]);
        }
        p.cones.nonneg = le_.size();
        for (std::size_t k = 0; k < soc_.size(); ++k) {
            for (std::size_t j = 0; j < soc_[k].size(); ++j, ++r) {
                for (const auto& [v, val] : soc_[k][j]) tg.emplace_back(static_cast<int>(r), static_cast<int>(v), val);
                h.push_back(hsoc_[k][j]);
            }
            p.cones.soc.push_back(soc_[k].size());
        }
        p.G.resize(static_cast<Eigen::Index>(r), n);
        p.G.setFromTriplets(tg.begin(), tg.end());
        p.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
        return p;
    }

    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::vector<Row> eq_;
    std::vector<double> b_;
    std::vector<Row> le_;
    std::vector<double> hle_;
    std::vector<std::vector<Row>> soc_;
    std::vector<std::vector<double>> hsoc_;
    std::vector<std::pair<std::size_t, double>> cost_;
};

struct QBlock {
    std::vector<std::size_t> features;
    std::vector<std::size_t> index;  // test-space index per Q variable
    std::size_t labels = 0;
};

QBlock add_q(Builder& bld, const std::vector<std::size_t>& features, std::size_t labels) {
    QBlock q;
    q.features = features;
    q.labels = labels;
    Row simplex;
    for (std::size_t x : features) {
        for (std::size_t y = 0; y < labels; ++y) {
            const std::size_t z = x * labels + y;
            const std::size_t v = bld.add_variable("q_" + std::to_string(z));
            q.index.push_back(z);
            bld.add_inequality({{v, -1.0}}, 0.0);
            simplex.emplace_back(v, 1.0);
        }
    }
    bld.add_equality(std::move(simplex), 1.0);
    return q;
}

/// m_x ≥ −Σ_y L(ŷ,y) Q(x,y) for every ŷ; cost λ m_x.
std::size_t add_entropy(Builder& bld, const QBlock& q, const LossMatrix& loss, double lambda) {
    const std::size_t first = bld.variables();
    const auto npred = static_cast<std::size_t>(loss.values().rows());
    for (std::size_t k = 0; k < q.features.size(); ++k) {
        const std::size_t m = bld.add_variable("m_" + std::to_string(q.features[k]));
        bld.add_cost(m, lambda);
        for (std::size_t yh = 0; yh < npred; ++yh) {
            Row row{{m, -1.0}};
            for (std::size_t y = 0; y < q.labels; ++y) {
                const double l = loss(yh, y);
                if (l != 0.0) row.emplace_back(k * q.labels + y, -l);
            }
            bld.add_inequality(std::move(row), 0.0);
        }
    }
    return first;
}

/// s ≥ ‖M Q − c‖ with M over the Q columns; cost weight·s.
std::size_t add_norm(Builder& bld, const Eigen::MatrixXd& M, const Eigen::VectorXd& c, NormKind kind, double weight,
                     const std::string& tag) {
    const std::size_t s = bld.add_variable("s" + tag);
    bld.add_cost(s, weight);
    auto mrow = [&](Eigen::Index j, double sign) {
        Row row;
        for (Eigen::Index col = 0; col < M.cols(); ++col)
            if (M(j, col) != 0.0) row.emplace_back(static_cast<std::size_t>(col), sign * M(j, col));
        return row;
    };
    switch (kind) {
        case NormKind::MaxAbs:
            for (Eigen::Index j = 0; j < M.rows(); ++j) {
                Row up = mrow(j, 1.0);
                up.emplace_back(s, -1.0);
                bld.add_inequality(std::move(up), c(j));
                Row dn = mrow(j, -1.0);
                dn.emplace_back(s, -1.0);
                bld.add_inequality(std::move(dn), -c(j));
            }
            break;
        case NormKind::SumAbs: {
            Row total{{s, -1.0}};
            for (Eigen::Index j = 0; j < M.rows(); ++j) {
                const std::size_t u = bld.add_variable("u" + tag + "_" + std::to_string(j));
                total.emplace_back(u, 1.0);
                Row up = mrow(j, 1.0);
                up.emplace_back(u, -1.0);
                bld.add_inequality(std::move(up), c(j));
                Row dn = mrow(j, -1.0);
                dn.emplace_back(u, -1.0);
                bld.add_inequality(std::move(dn), -c(j));
            }
            bld.add_inequality(std::move(total), 0.0);
            break;
        }
        case NormKind::Euclidean: {
            std::vector<Row> rows{{{s, -1.0}}};
            std::vector<double> h{0.0};
            for (Eigen::Index j = 0; j < M.rows(); ++j) {
                rows.push_back(mrow(j, -1.0));
                h.push_back(-c(j));
            }
            bld.add_soc(std::move(rows), std::move(h));
            break;
        }
    }
    return s;
}

/// Columns of a test-space matrix restricted to the Q variables.
Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& full, const QBlock& q) {
    Eigen::MatrixXd out(full.rows(), static_cast<Eigen::Index>(q.index.size()));
    for (std::size_t k = 0; k < q.index.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = full.col(static_cast<Eigen::Index>(q.index[k]));
    return out;
}

Eigen::VectorXd bridge_image(const BridgeTriple& t) {
    return t.train_to_bridge.kernel().transpose() * t.empirical.mass();
}

std::vector<std::size_t> data_support(const GrrmProblem& problem) {
    const SupervisionScheme& sch = problem.scheme;
    const std::size_t nx = sch.features().size();
    const std::size_t ny = sch.labels().size();
    std::vector<bool> keep(nx, false);
    for (const auto& t : sch.triples()) {
        const Eigen::VectorXd r = bridge_image(t);
        const Eigen::MatrixXd& K = t.test_to_bridge.kernel();
        for (std::size_t x = 0; x < nx; ++x) {
            if (keep[x]) continue;
            for (std::size_t y = 0; y < ny && !keep[x]; ++y) {
                const auto z = static_cast<Eigen::Index>(x * ny + y);
                for (Eigen::Index b = 0; b < K.cols(); ++b)
                    if (K(z, b) > kReachTolerance && r(b) > kReachTolerance) {
                        keep[x] = true;
                        break;
                    }
            }
        }
    }
    if (problem.marginal_pin)
        for (std::size_t x = 0; x < nx; ++x)
            if ((*problem.marginal_pin)[x] > 0.0) keep[x] = true;
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < nx; ++x)
        if (keep[x]) out.push_back(x);
    return out;
}

/// Groups identical rows of T̃'s kernel; the witness only matters through
/// T̃ᵀ Q̃, so one coordinate per group suffices.
std::vector<std::vector<std::size_t>> group_rows(const Eigen::MatrixXd& K) {
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::vector<std::size_t>> groups;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(K.cols()));
        for (Eigen::Index j = 0; j < K.cols(); ++j) key[static_cast<std::size_t>(j)] = K(i, j);
        auto [it, inserted] = seen.emplace(std::move(key), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(static_cast<std::size_t>(i));
    }
    return groups;
}

Distribution normalized(const FiniteSpace& space, Eigen::VectorXd v) {
    v = v.cwiseMax(0.0);
    const double total = v.sum();
    if (!(total > 0.0)) return Distribution::uniform(space);
    return {space, v / total};
}

Distribution expand_q(const QBlock& q, const FiniteSpace& test, const Eigen::VectorXd& x, double& min_entry) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(test.size()));
    min_entry = 0.0;
    for (std::size_t k = 0; k < q.index.size(); ++k) {
        const double v = x(static_cast<Eigen::Index>(k));
        min_entry = std::min(min_entry, v);
        full(static_cast<Eigen::Index>(q.index[k])) = v;
    }
    return normalized(test, std::move(full));
}

SolveStatus map_status(conic::Status s) {
    switch (s) {
        case conic::Status::Optimal: return SolveStatus::Optimal;
        case conic::Status::PrimalInfeasible: return SolveStatus::Infeasible;
        case conic::Status::DualInfeasible: return SolveStatus::Unbounded;
        default: return SolveStatus::ToleranceNotMet;
    }
}

void check_lambda(double lambda, std::vector<std::string>& warnings) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (lambda < 1e-9) warnings.emplace_back("lambda below 1e-9: the minimizer may not be unique");
}

struct Assembly {
    AssembledProgram out;
    QBlock q;
};

Assembly assemble(const GrrmProblem& problem, FeatureSupport support) {
    const SupervisionScheme& sch = problem.scheme;
    const std::size_t ny = sch.labels().size();
    std::vector<std::size_t> features;
    if (support == FeatureSupport::Full) {
        for (std::size_t x = 0; x < sch.features().size(); ++x) features.push_back(x);
    } else {
        features = data_support(problem);
    }

    Builder bld;
    Assembly a;
    a.q = add_q(bld, features, ny);
    a.out.m_offset = add_entropy(bld, a.q, sch.loss(), problem.lambda);

    for (std::size_t i = 0; i < sch.size(); ++i) {
        const BridgeTriple& t = sch.triples()[i];
        const std::string tag = std::to_string(i);
        AssembledProgram::WitnessBlock wb;
        wb.offset = bld.variables();
        wb.groups = group_rows(t.train_to_bridge.kernel());
        const Eigen::MatrixXd& Tt = t.train_to_bridge.kernel();
        const Eigen::MatrixXd Tq = restrict_columns(t.test_to_bridge.kernel().transpose(), a.q);  // |B| × |Q|
        for (std::size_t g = 0; g < wb.groups.size(); ++g) {
            const std::size_t v = bld.add_variable("w" + tag + "_" + std::to_string(g));
            bld.add_inequality({{v, -1.0}}, 0.0);
        }
        for (Eigen::Index b = 0; b < Tq.rows(); ++b) {
            Row row;
            for (Eigen::Index k = 0; k < Tq.cols(); ++k)
                if (Tq(b, k) != 0.0) row.emplace_back(static_cast<std::size_t>(k), Tq(b, k));
            for (std::size_t g = 0; g < wb.groups.size(); ++g) {
                const double r = Tt(static_cast<Eigen::Index>(wb.groups[g].front()), b);
                if (r != 0.0) row.emplace_back(wb.offset + g, -r);
            }
            if (!row.empty()) bld.add_equality(std::move(row), 0.0);
        }
        a.out.witnesses.push_back(std::move(wb));

        const Statistic& st = problem.statistics[i];
        const Eigen::MatrixXd M = st.values().transpose() * Tq;  // k × |Q|
        const Eigen::VectorXd c = st.values().transpose() * bridge_image(t);
        a.out.s_offset.push_back(add_norm(bld, M, c, problem.norm, t.weight, tag));
    }

    if (problem.marginal_pin) {
        for (std::size_t k = 0; k < features.size(); ++k) {
            Row row;
            for (std::size_t y = 0; y < ny; ++y) row.emplace_back(k * ny + y, 1.0);
            bld.add_equality(std::move(row), (*problem.marginal_pin)[features[k]]);
        }
        for (std::size_t x = 0; x < sch.features().size(); ++x)
            if ((*problem.marginal_pin)[x] > 0.0 &&
                std::find(features.begin(), features.end(), x) == features.end())
                throw std::logic_error("marginal pin outside the feature support");
    }

    a.out.program = bld.build();
    a.out.variable_names = bld.names();
    a.out.q_index = a.q.index;
    a.out.support_features = features;
    return a;
}

Distribution reconstruct_witness(const BridgeTriple& t, const AssembledProgram::WitnessBlock& wb,
                                 const Eigen::VectorXd& x) {
    const FiniteSpace& space = t.training_space();
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    for (std::size_t g = 0; g < wb.groups.size(); ++g) {
        const double w = std::max(0.0, x(static_cast<Eigen::Index>(wb.offset + g)));
        const auto& members = wb.groups[g];
        double emp = 0.0;
        for (std::size_t z : members) emp += t.empirical[z];
        for (std::size_t z : members) {
            const double share = emp > 0.0 ? t.empirical[z] / emp : 1.0 / static_cast<double>(members.size());
            mass(static_cast<Eigen::Index>(z)) += w * share;
        }
    }
    return normalized(space, std::move(mass));
}

void fill_objective_terms(const GrrmProblem& problem, GrrmSolution& sol) {
    const Distribution& q = *sol.q_star;
    sol.entropy = general_entropy(q, problem.scheme.loss());
    sol.discrepancy_terms.clear();
    double total = 0.0;
    for (std::size_t i = 0; i < problem.scheme.size(); ++i) {
        const BridgeTriple& t = problem.scheme.triples()[i];
        const Eigen::VectorXd diff = apply_linear(t.test_to_bridge, q.mass()) - bridge_image(t);
        const double psi = norm(problem.statistics[i].values().transpose() * diff, problem.norm);
        sol.discrepancy_terms.push_back(psi);
        total += t.weight * psi;
    }
    sol.objective = total - problem.lambda * sol.entropy;
}

GrrmSolution solve_with_support(const GrrmProblem& problem, FeatureSupport support, const conic::Settings& settings) {
    GrrmSolution sol;
    check_lambda(problem.lambda, sol.warnings);
    const Assembly a = assemble(problem, support);
    const conic::Result r = conic::solve(a.out.program, settings);
    sol.status = map_status(r.status);
    sol.iterations = r.iterations;
    sol.certificate = r.certificate;
    sol.program_objective = r.primal_objective;
    if (sol.status != SolveStatus::Optimal && r.x.size() == 0) return sol;
    if (r.x.size() == 0) return sol;
    if (sol.status == SolveStatus::Optimal && !r.certificate.certified) {
        sol.status = SolveStatus::ToleranceNotMet;
        sol.warnings.emplace_back("optimality certificate failed");
    }
    if (sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::Unbounded) return sol;

    double min_entry = 0.0;
    sol.q_star = expand_q(a.q, problem.scheme.test_space(), r.x, min_entry);
    if (min_entry < -kClipTolerance) {
        sol.status = SolveStatus::ToleranceNotMet;
        sol.warnings.emplace_back("Q* has entries below -1e-9 before clipping");
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < problem.scheme.size(); ++i) {
        const BridgeTriple& t = problem.scheme.triples()[i];
        sol.witnesses.push_back(reconstruct_witness(t, a.out.witnesses[i], r.x));
        const Eigen::VectorXd lhs = apply_linear(t.test_to_bridge, sol.q_star->mass());
        const Eigen::VectorXd rhs = apply_linear(t.train_to_bridge, sol.witnesses.back().mass());
        residual = std::max(residual, (lhs - rhs).lpNorm<Eigen::Infinity>());
    }
    sol.feasibility_residual = residual;
    if (residual > problem.tolerance) {
        sol.status = SolveStatus::ToleranceNotMet;
        sol.warnings.emplace_back("feasibility residual above tolerance");
    }
    fill_objective_terms(problem, sol);
    return sol;
}

}  // namespace

void GrrmProblem::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("GrrmProblem: lambda must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("GrrmProblem: tolerance must be positive");
    if (statistics.size() != scheme.size())
        throw std::invalid_argument("GrrmProblem: need one statistic per triple");
    for (std::size_t i = 0; i < scheme.size(); ++i)
        if (!(statistics[i].space() == scheme.triples()[i].bridge_space()))
            throw std::invalid_argument("GrrmProblem: statistic " + std::to_string(i) + " is not over its bridge");
    if (marginal_pin && !(marginal_pin->space() == scheme.features()))
        throw std::invalid_argument("GrrmProblem: marginal pin must be over test features");
}

GrrmProblem make_problem(SupervisionScheme scheme, double lambda, NormKind norm) {
    std::vector<Statistic> stats;
    for (const auto& t : scheme.triples()) stats.push_back(indicator_statistic(t.bridge_space()));
    return {std::move(scheme), lambda, std::move(stats), norm, std::nullopt};
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::ToleranceNotMet: return "tolerance-not-met";
    }
    return "?";
}

AssembledProgram assemble_program(const GrrmProblem& problem) {
    problem.validate();
    return assemble(problem, problem.support).out;
}

GrrmSolution solve(const GrrmProblem& problem, const conic::Settings& settings) {
    problem.validate();
    GrrmSolution sol = solve_with_support(problem, problem.support, settings);
    if (sol.status == SolveStatus::Infeasible && problem.support == FeatureSupport::Data) {
        GrrmSolution wide = solve_with_support(problem, FeatureSupport::Full, settings);
        wide.warnings.emplace_back("data support infeasible; solved over the full feature space");
        return wide;
    }
    return sol;
}

GrrmSolution solve_rrm(const Distribution& empirical, double lambda, const Statistic& statistic, NormKind norm,
                       const std::optional<LossMatrix>& loss_opt, const conic::Settings& settings) {
    const FiniteSpace& test = empirical.space();
    if (test.factor_count() != 2) throw std::invalid_argument("solve_rrm: expected a features x labels space");
    if (!(statistic.space() == test)) throw std::invalid_argument("solve_rrm: statistic not over the test space");
    const LossMatrix loss = loss_opt ? *loss_opt : LossMatrix::zero_one(test.factor(1));
    GrrmSolution sol;
    check_lambda(lambda, sol.warnings);

    const std::size_t nx = test.factor(0).size();
    const std::size_t ny = test.factor(1).size();
    std::vector<std::size_t> features;
    for (std::size_t x = 0; x < nx; ++x) {
        double m = 0.0;
        for (std::size_t y = 0; y < ny; ++y) m += empirical[x * ny + y];
        if (m > 0.0) features.push_back(x);
    }
    Builder bld;
    const QBlock q = add_q(bld, features, ny);
    add_entropy(bld, q, loss, lambda);
    const Eigen::MatrixXd M = restrict_columns(statistic.values().transpose(), q);
    const Eigen::VectorXd c = statistic.values().transpose() * empirical.mass();
    add_norm(bld, M, c, norm, 1.0, "0");
    const conic::Result r = conic::solve(bld.build(), settings);
    sol.status = map_status(r.status);
    sol.iterations = r.iterations;
    sol.certificate = r.certificate;
    sol.program_objective = r.primal_objective;
    if (r.x.size() == 0 || sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::Unbounded) return sol;
    if (sol.status == SolveStatus::Optimal && !r.certificate.certified) sol.status = SolveStatus::ToleranceNotMet;
    double min_entry = 0.0;
    sol.q_star = expand_q(q, test, r.x, min_entry);
    if (min_entry < -kClipTolerance) sol.status = SolveStatus::ToleranceNotMet;
    sol.entropy = general_entropy(*sol.q_star, loss);
    const double psi =
        grrm::norm(statistic.values().transpose() * (sol.q_star->mass() - empirical.mass()), norm);
    sol.discrepancy_terms = {psi};
    sol.objective = psi - lambda * sol.entropy;
    return sol;
}

bool uniform_is_feasible(const SupervisionScheme& scheme) {
    const Distribution u = Distribution::uniform(scheme.test_space());
    Builder bld;
    std::vector<std::pair<std::size_t, std::vector<std::vector<std::size_t>>>> blocks;
    for (const auto& t : scheme.triples()) {
        const auto groups = group_rows(t.train_to_bridge.kernel());
        const std::size_t off = bld.variables();
        Row simplex;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const std::size_t v = bld.add_variable("w_" + std::to_string(off + g));
            bld.add_inequality({{v, -1.0}}, 0.0);
            simplex.emplace_back(v, 1.0);
        }
        bld.add_equality(std::move(simplex), 1.0);
        const Eigen::VectorXd target = apply_linear(t.test_to_bridge, u.mass());
        const Eigen::MatrixXd& K = t.train_to_bridge.kernel();
        for (Eigen::Index b = 0; b < K.cols(); ++b) {
            Row row;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                const double r = K(static_cast<Eigen::Index>(groups[g].front()), b);
                if (r != 0.0) row.emplace_back(off + g, r);
            }
            if (row.empty()) {
                if (std::abs(target(b)) > kClipTolerance) return false;
                continue;
            }
            bld.add_equality(std::move(row), target(b));
        }
    }
    const conic::Result r = conic::solve(bld.build());
    return r.status == conic::Status::Optimal && r.certificate.primal_equality <= 1e-8 &&
           r.certificate.primal_cone <= 1e-8;
}

double weighted_discrepancy(const Distribution& q, const GrrmProblem& problem) {
    problem.validate();
    if (!(q.space() == problem.scheme.test_space()))
        throw std::invalid_argument("weighted_discrepancy: q not over the test space");
    double total = 0.0;
    for (std::size_t i = 0; i < problem.scheme.size(); ++i) {
        const BridgeTriple& t = problem.scheme.triples()[i];
        const Eigen::VectorXd diff = apply_linear(t.test_to_bridge, q.mass()) - bridge_image(t);
        total += t.weight * norm(problem.statistics[i].values().transpose() * diff, problem.norm);
    }
    return total;
}

bool uncertainty_membership(const Distribution& q, const GrrmProblem& problem, const UncertaintySpec& spec) {
    if (!(spec.radius > 0.0)) throw std::invalid_argument("uncertainty radius must be positive");
    return weighted_discrepancy(q, problem) < spec.radius;
}

ErmDiagnostic erm_backprojection(const BridgeTriple& triple) {
    if (!triple.train_to_bridge.is_identity(0.0))
        throw std::invalid_argument("erm_backprojection: training transformation must be the identity");
    const Eigen::MatrixXd& K = triple.test_to_bridge.kernel();
    if (K.rows() != K.cols()) throw std::invalid_argument("erm_backprojection: T is not square");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K.transpose());
    if (!lu.isInvertible()) throw std::invalid_argument("erm_backprojection: T is not invertible");
    const Eigen::VectorXd q = lu.solve(triple.empirical.mass());
    ErmDiagnostic d{SignedMeasure(triple.test_space(), q), {}, 0.0, 0};
    Eigen::Index arg = 0;
    d.min_entry = q.minCoeff(&arg);
    d.argmin = static_cast<std::size_t>(arg);
    for (Eigen::Index i = 0; i < q.size(); ++i)
        if (q(i) < 0.0) d.negative_entries.push_back(static_cast<std::size_t>(i));
    return d;
}

namespace {

void write_terms(std::ostream& out, const std::vector<std::pair<std::string, double>>& terms) {
    for (const auto& [name, v] : terms) out << (v < 0 ? " - " : " + ") << std::abs(v) << ' ' << name;
}

}  // namespace

void write_lp(const conic::Program& p, const std::vector<std::string>& names, std::ostream& out) {
    if (names.size() != p.variables()) throw std::invalid_argument("write_lp: one name per variable");
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << "\\ conic program: " << p.variables() << " variables\n";
    out << "Minimize\n obj:";
    std::vector<std::pair<std::string, double>> obj;
    for (Eigen::Index j = 0; j < p.c.size(); ++j)
        if (p.c(j) != 0.0) obj.emplace_back(names[static_cast<std::size_t>(j)], p.c(j));
    write_terms(out, obj);
    out << "\nSubject To\n";

    const Eigen::SparseMatrix<double, Eigen::RowMajor> A = p.A;
    const Eigen::SparseMatrix<double, Eigen::RowMajor> G = p.G;
    auto row_terms = [&](const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, Eigen::Index r) {
        std::vector<std::pair<std::string, double>> t;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it)
            t.emplace_back(names[static_cast<std::size_t>(it.col())], it.value());
        return t;
    };
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        out << " e" << r << ':';
        write_terms(out, row_terms(A, r));
        out << " = " << p.b(r) << '\n';
    }
    const auto l = static_cast<Eigen::Index>(p.cones.nonneg);
    for (Eigen::Index r = 0; r < l; ++r) {
        out << " g" << r << ':';
        write_terms(out, row_terms(G, r));
        out << " <= " << p.h(r) << '\n';
    }
    std::vector<std::string> heads;
    Eigen::Index off = l;
    for (std::size_t k = 0; k < p.cones.soc.size(); ++k) {
        const auto q = static_cast<Eigen::Index>(p.cones.soc[k]);
        std::vector<std::string> aux;
        for (Eigen::Index j = 0; j < q; ++j) {
            const std::string a = "a" + std::to_string(k) + "_" + std::to_string(j);
            aux.push_back(a);
            auto t = row_terms(G, off + j);
            t.emplace_back(a, 1.0);
            out << " c" << k << "_" << j << ':';
            write_terms(out, t);
            out << " = " << p.h(off + j) << '\n';
        }
        out << " soc" << k << ": [";
        for (Eigen::Index j = 1; j < q; ++j) out << (j > 1 ? " + " : " ") << aux[static_cast<std::size_t>(j)] << " ^2";
        out << " - " << aux[0] << " ^2 ] <= 0\n";
        heads.push_back(aux[0]);
        for (Eigen::Index j = 1; j < q; ++j) heads.push_back(aux[static_cast<std::size_t>(j)] + " free");
        off += q;
    }
    out << "Bounds\n";
    for (const auto& n : names) out << ' ' << n << " free\n";
    for (const auto& h : heads) {
        if (h.size() > 5 && h.compare(h.size() - 5, 5, " free") == 0)
            out << ' ' << h << '\n';
        else
            out << ' ' << h << " >= 0\n";
    }
    out << "End\n";
    out.precision(old_precision);
}

}  // namespace grrm
