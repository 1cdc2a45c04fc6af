#include "grrm/finite_space.hpp"

#include "grrm/transition.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace grrm {

FiniteSpace FiniteSpace::make(std::vector<std::string> elements) {
    if (elements.empty()) throw std::invalid_argument("make_space: empty element list");
    auto impl = std::make_shared<Impl>();
    impl->index.reserve(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (!impl->index.emplace(elements[i], i).second)
            throw std::invalid_argument("make_space: duplicate element '" + elements[i] + "'");
    }
    impl->elements = std::move(elements);
    FiniteSpace s;
    s.impl_ = std::move(impl);
    return s;
}

FiniteSpace FiniteSpace::product(std::span<const FiniteSpace> factors) {
    if (factors.empty()) throw std::invalid_argument("product_space: no factors");
    std::size_t total = 1;
    for (const auto& f : factors) {
        if (f.empty()) throw std::invalid_argument("product_space: empty factor");
        if (total > std::numeric_limits<std::size_t>::max() / f.size())
            throw std::overflow_error("product_space: size overflow");
        total *= f.size();
    }
    std::vector<std::string> elements;
    elements.reserve(total);
    std::vector<std::size_t> digits(factors.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::string label = "(";
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) label += ',';
            label += factors[k].element(digits[k]);
        }
        label += ')';
        elements.push_back(std::move(label));
        for (std::size_t k = factors.size(); k-- > 0;) {
            if (++digits[k] < factors[k].size()) break;
            digits[k] = 0;
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->index.reserve(total);
    for (std::size_t i = 0; i < total; ++i) impl->index.emplace(elements[i], i);
    if (impl->index.size() != total)
        throw std::invalid_argument("product_space: element labels collide");
    impl->elements = std::move(elements);
    impl->factors.assign(factors.begin(), factors.end());
    FiniteSpace s;
    s.impl_ = std::move(impl);
    return s;
}

std::size_t FiniteSpace::index_of(const std::string& label) const {
    if (!impl_) throw std::out_of_range("index_of: empty space");
    auto it = impl_->index.find(label);
    if (it == impl_->index.end()) throw std::out_of_range("element '" + label + "' not in space");
    return it->second;
}

bool FiniteSpace::contains(const std::string& label) const {
    return impl_ && impl_->index.count(label) > 0;
}

std::vector<std::size_t> FiniteSpace::decompose(std::size_t flat) const {
    if (!factorized()) throw std::logic_error("decompose: space is not factorized");
    if (flat >= size()) throw std::out_of_range("decompose: index out of range");
    std::vector<std::size_t> parts(impl_->factors.size());
    for (std::size_t k = parts.size(); k-- > 0;) {
        const std::size_t n = impl_->factors[k].size();
        parts[k] = flat % n;
        flat /= n;
    }
    return parts;
}

std::size_t FiniteSpace::compose(std::span<const std::size_t> parts) const {
    if (!factorized()) throw std::logic_error("compose: space is not factorized");
    if (parts.size() != impl_->factors.size()) throw std::invalid_argument("compose: wrong arity");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const std::size_t n = impl_->factors[k].size();
        if (parts[k] >= n) throw std::out_of_range("compose: factor index out of range");
        flat = flat * n + parts[k];
    }
    return flat;
}

bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
    if (a.impl_ == b.impl_) return true;
    if (!a.impl_ || !b.impl_) return false;
    if (a.size() != b.size() || a.factor_count() != b.factor_count()) return false;
    if (a.factorized()) {
        for (std::size_t k = 0; k < a.factor_count(); ++k)
            if (!(a.factor(k) == b.factor(k))) return false;
        return true;
    }
    return a.impl_->elements == b.impl_->elements;
}

FiniteSpace make_space(std::vector<std::string> elements) { return FiniteSpace::make(std::move(elements)); }

FiniteSpace product_space(const FiniteSpace& v, const FiniteSpace& w) {
    const FiniteSpace parts[] = {v, w};
    return FiniteSpace::product(parts);
}

FiniteSpace product_space(std::span<const FiniteSpace> factors) { return FiniteSpace::product(factors); }

namespace {

void check_probability_vector(const Eigen::VectorXd& mass, std::size_t expected, const char* what) {
    if (static_cast<std::size_t>(mass.size()) != expected)
        throw std::invalid_argument(std::string(what) + ": mass length does not match space");
    if (!mass.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite mass");
    if (expected > 0 && mass.minCoeff() < -kMassTolerance)
        throw std::invalid_argument(std::string(what) + ": negative mass");
    if (std::abs(mass.sum() - 1.0) > kMassTolerance)
        throw std::invalid_argument(std::string(what) + ": mass does not sum to one");
}

}  // namespace

Distribution::Distribution(FiniteSpace space, Eigen::VectorXd mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
    check_probability_vector(mass_, space_.size(), "Distribution");
    mass_ = mass_.cwiseMax(0.0);
}

Distribution Distribution::uniform(const FiniteSpace& space) {
    return {space, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.size()),
                                             1.0 / static_cast<double>(space.size()))};
}

Distribution Distribution::point(const FiniteSpace& space, std::size_t index) {
    if (index >= space.size()) throw std::out_of_range("Distribution::point: index out of range");
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    m(static_cast<Eigen::Index>(index)) = 1.0;
    return {space, std::move(m)};
}

SignedMeasure::SignedMeasure(FiniteSpace space, Eigen::VectorXd mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
    if (static_cast<std::size_t>(mass_.size()) != space_.size())
        throw std::invalid_argument("SignedMeasure: mass length does not match space");
    if (!mass_.allFinite()) throw std::invalid_argument("SignedMeasure: non-finite mass");
    if (std::abs(mass_.sum() - 1.0) > kSignedMassTolerance)
        throw std::invalid_argument("SignedMeasure: mass does not sum to one");
}

LossMatrix::LossMatrix(FiniteSpace predicted, FiniteSpace truth, Eigen::MatrixXd values)
    : predicted_(std::move(predicted)), truth_(std::move(truth)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != predicted_.size() ||
        static_cast<std::size_t>(values_.cols()) != truth_.size())
        throw std::invalid_argument("LossMatrix: shape does not match label spaces");
    if (!values_.allFinite()) throw std::invalid_argument("LossMatrix: non-finite entry");
}

LossMatrix LossMatrix::zero_one(const FiniteSpace& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
    return {labels, labels, std::move(v)};
}

Distribution empirical_distribution(std::span<const std::size_t> samples, const FiniteSpace& space) {
    if (samples.empty()) throw std::invalid_argument("empirical_distribution: no samples");
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    for (std::size_t s : samples) {
        if (s >= space.size()) throw std::out_of_range("empirical_distribution: sample outside space");
        counts(static_cast<Eigen::Index>(s)) += 1.0;
    }
    counts /= static_cast<double>(samples.size());
    return {space, std::move(counts)};
}

Distribution empirical_distribution(std::span<const std::string> samples, const FiniteSpace& space) {
    std::vector<std::size_t> idx;
    idx.reserve(samples.size());
    for (const auto& s : samples) idx.push_back(space.index_of(s));
    return empirical_distribution(std::span<const std::size_t>(idx), space);
}

Distribution marginal(const Distribution& q, std::size_t component) {
    const FiniteSpace& space = q.space();
    if (!space.factorized()) throw std::invalid_argument("marginal: space is not factorized");
    if (component >= space.factor_count()) throw std::out_of_range("marginal: bad component index");
    const FiniteSpace& target = space.factor(component);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.size()));
    for (std::size_t i = 0; i < space.size(); ++i)
        m(static_cast<Eigen::Index>(space.decompose(i)[component])) += q[i];
    m /= m.sum();
    return {target, std::move(m)};
}

Transition conditional(const Distribution& q, std::size_t target, std::size_t given, ZeroMassRow fallback) {
    const FiniteSpace& space = q.space();
    if (!space.factorized()) throw std::invalid_argument("conditional: space is not factorized");
    if (target >= space.factor_count() || given >= space.factor_count() || target == given)
        throw std::out_of_range("conditional: bad component indices");
    const FiniteSpace& vs = space.factor(given);
    const FiniteSpace& ws = space.factor(target);
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vs.size()),
                                                  static_cast<Eigen::Index>(ws.size()));
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto parts = space.decompose(i);
        joint(static_cast<Eigen::Index>(parts[given]), static_cast<Eigen::Index>(parts[target])) += q[i];
    }
    for (Eigen::Index v = 0; v < joint.rows(); ++v) {
        const double row = joint.row(v).sum();
        if (row > 0.0) {
            joint.row(v) /= row;
        } else if (fallback == ZeroMassRow::Uniform) {
            joint.row(v).setConstant(1.0 / static_cast<double>(joint.cols()));
        } else {
            throw std::domain_error("conditional: zero-mass conditioning value '" +
                                    vs.element(static_cast<std::size_t>(v)) + "'");
        }
    }
    return Transition(vs, ws, std::move(joint));
}

double expected_loss(const Distribution& q, std::span<const std::size_t> rule, const LossMatrix& loss) {
    const FiniteSpace& space = q.space();
    if (space.factor_count() != 2) throw std::invalid_argument("expected_loss: expected features x labels");
    const std::size_t nx = space.factor(0).size();
    const std::size_t ny = space.factor(1).size();
    if (rule.size() != nx) throw std::invalid_argument("expected_loss: rule not total on features");
    if (loss.true_space().size() != ny) throw std::invalid_argument("expected_loss: loss/label mismatch");
    double total = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        if (rule[x] >= loss.predicted_space().size())
            throw std::out_of_range("expected_loss: rule value outside predicted labels");
        for (std::size_t y = 0; y < ny; ++y) total += q[x * ny + y] * loss(rule[x], y);
    }
    return total;
}

}  // namespace grrm
