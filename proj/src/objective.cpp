#include "grrm/objective.hpp"

#include <stdexcept>
#include <string>

namespace grrm {

Statistic::Statistic(FiniteSpace space, Eigen::MatrixXd values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != space_.size())
        throw std::invalid_argument("Statistic: need one row per space element");
    if (values_.cols() < 1) throw std::invalid_argument("Statistic: dimension must be >= 1");
    if (!values_.allFinite()) throw std::invalid_argument("Statistic: non-finite value");
}

NormKind parse_norm(std::string_view name) {
    if (name == "max-abs") return NormKind::MaxAbs;
    if (name == "sum-abs") return NormKind::SumAbs;
    if (name == "euclidean") return NormKind::Euclidean;
    throw std::invalid_argument("unknown norm '" + std::string(name) + "'");
}

std::string_view norm_name(NormKind kind) {
    switch (kind) {
        case NormKind::MaxAbs: return "max-abs";
        case NormKind::SumAbs: return "sum-abs";
        case NormKind::Euclidean: return "euclidean";
    }
    return "?";
}

double norm(const Eigen::VectorXd& v, NormKind kind) {
    if (v.size() == 0) return 0.0;
    switch (kind) {
        case NormKind::MaxAbs: return v.cwiseAbs().maxCoeff();
        case NormKind::SumAbs: return v.cwiseAbs().sum();
        case NormKind::Euclidean: return v.norm();
    }
    return 0.0;
}

namespace {

void require_features_by_labels(const FiniteSpace& s, const char* what) {
    if (s.factor_count() != 2) throw std::invalid_argument(std::string(what) + ": expected a features x labels space");
}

}  // namespace

double zero_one_entropy(const Distribution& q) {
    require_features_by_labels(q.space(), "zero_one_entropy");
    const auto ny = static_cast<Eigen::Index>(q.space().factor(1).size());
    const auto nx = static_cast<Eigen::Index>(q.space().factor(0).size());
    double top = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) top += q.mass().segment(x * ny, ny).maxCoeff();
    return 1.0 - top;
}

double general_entropy(const Distribution& q, const LossMatrix& loss) {
    require_features_by_labels(q.space(), "general_entropy");
    const auto ny = static_cast<Eigen::Index>(q.space().factor(1).size());
    const auto nx = static_cast<Eigen::Index>(q.space().factor(0).size());
    if (loss.values().cols() != ny) throw std::invalid_argument("general_entropy: loss/label mismatch");
    double h = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) h += (loss.values() * q.mass().segment(x * ny, ny)).minCoeff();
    return h;
}

Eigen::VectorXd statistic_mean(const Eigen::VectorXd& mass, const Statistic& t) {
    if (static_cast<std::size_t>(mass.size()) != t.space().size())
        throw std::invalid_argument("statistic_mean: length mismatch");
    return t.values().transpose() * mass;
}

Eigen::VectorXd statistic_mean(const Distribution& q, const Statistic& t) {
    if (!(q.space() == t.space())) throw std::invalid_argument("statistic_mean: space mismatch");
    return statistic_mean(q.mass(), t);
}

double discrepancy(const Distribution& q1, const Distribution& q2, const Statistic& t, NormKind kind) {
    if (!(q1.space() == t.space()) || !(q2.space() == t.space()))
        throw std::invalid_argument("discrepancy: space mismatch");
    return norm(t.values().transpose() * (q1.mass() - q2.mass()), kind);
}

Statistic indicator_statistic(const FiniteSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.size());
    return {space, Eigen::MatrixXd::Identity(n, n)};
}

Eigen::MatrixXd one_hot_embedding(const FiniteSpace& features) {
    const auto nx = static_cast<Eigen::Index>(features.size());
    if (!features.factorized()) return Eigen::MatrixXd::Identity(nx, nx);
    Eigen::Index d = 0;
    for (const auto& f : features.factors()) d += static_cast<Eigen::Index>(f.size());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nx, d);
    for (Eigen::Index x = 0; x < nx; ++x) {
        const auto parts = features.decompose(static_cast<std::size_t>(x));
        Eigen::Index offset = 0;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            e(x, offset + static_cast<Eigen::Index>(parts[k])) = 1.0;
            offset += static_cast<Eigen::Index>(features.factor(k).size());
        }
    }
    return e;
}

Statistic one_hot_statistic(const FiniteSpace& space, const std::optional<Eigen::MatrixXd>& embedding) {
    require_features_by_labels(space, "one_hot_statistic");
    const FiniteSpace& features = space.factor(0);
    if (space.factor(1).size() != 2) throw std::invalid_argument("one_hot_statistic: labels must be binary");
    const Eigen::MatrixXd emb = embedding ? *embedding : one_hot_embedding(features);
    if (static_cast<std::size_t>(emb.rows()) != features.size())
        throw std::invalid_argument("one_hot_statistic: embedding must have one row per feature");
    const Eigen::Index d = emb.cols();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space.size()), 2 * (1 + d));
    for (Eigen::Index x = 0; x < emb.rows(); ++x) {
        for (Eigen::Index y = 0; y < 2; ++y) {
            auto row = t.row(x * 2 + y);
            const Eigen::Index off = y * (1 + d);
            row(off) = 1.0;
            row.segment(off + 1, d) = emb.row(x);
        }
    }
    return {space, std::move(t)};
}

}  // namespace grrm
