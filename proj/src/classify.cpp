#include "grrm/classify.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace grrm {

namespace {

std::size_t argmin_with_ties(const Eigen::VectorXd& risk) {
    std::size_t best = 0;
    for (Eigen::Index k = 1; k < risk.size(); ++k) {
        const double cur = risk(static_cast<Eigen::Index>(best));
        const double slack = kTieTolerance * std::max({1e-300, std::abs(cur), std::abs(risk(k))});
        if (risk(k) < cur - slack) best = static_cast<std::size_t>(k);
    }
    return best;
}

}  // namespace

PosteriorRule posterior_rule(const Distribution& q, const LossMatrix& loss) {
    const FiniteSpace& space = q.space();
    if (space.factor_count() != 2) throw std::invalid_argument("posterior_rule: expected features x labels");
    PosteriorRule rule;
    rule.features = space.factor(0);
    rule.labels = space.factor(1);
    const auto nx = static_cast<Eigen::Index>(rule.features.size());
    const auto ny = static_cast<Eigen::Index>(rule.labels.size());
    if (loss.values().cols() != ny) throw std::invalid_argument("posterior_rule: loss/label mismatch");

    Eigen::VectorXd label_marginal = Eigen::VectorXd::Zero(ny);
    for (Eigen::Index x = 0; x < nx; ++x) label_marginal += q.mass().segment(x * ny, ny);
    rule.fallback = argmin_with_ties(loss.values() * label_marginal);

    rule.decision.resize(static_cast<std::size_t>(nx));
    rule.has_mass.resize(static_cast<std::size_t>(nx));
    for (Eigen::Index x = 0; x < nx; ++x) {
        const auto joint = q.mass().segment(x * ny, ny);
        const bool massive = joint.sum() > kMassTolerance;
        rule.has_mass[static_cast<std::size_t>(x)] = massive;
        rule.decision[static_cast<std::size_t>(x)] = massive ? argmin_with_ties(loss.values() * joint) : rule.fallback;
    }
    return rule;
}

Evaluation evaluate(const PosteriorRule& rule, std::span<const std::size_t> samples, const LossMatrix& loss) {
    if (samples.empty()) throw std::invalid_argument("evaluate: empty test set");
    const std::size_t ny = rule.labels.size();
    const bool same_labels = loss.predicted_space() == rule.labels;
    Evaluation e;
    e.samples = samples.size();
    double total = 0.0;
    for (std::size_t z : samples) {
        if (z >= rule.features.size() * ny) throw std::out_of_range("evaluate: sample outside the test space");
        const std::size_t x = z / ny;
        const std::size_t y = z % ny;
        const std::size_t pred = rule(x);
        const bool hit = same_labels ? pred == y
                                     : loss.predicted_space().element(pred) == rule.labels.element(y);
        if (hit) ++e.correct;
        total += loss(pred, y);
    }
    e.accuracy = static_cast<double>(e.correct) / static_cast<double>(e.samples);
    e.average_loss = total / static_cast<double>(e.samples);
    return e;
}

WeightTable export_weights(const Distribution& q, std::span<const std::size_t> samples) {
    std::unordered_map<std::size_t, std::size_t> counts;
    for (std::size_t z : samples) {
        if (z >= q.size()) throw std::out_of_range("export_weights: sample outside the test space");
        ++counts[z];
    }
    WeightTable t;
    t.weights.resize(samples.size());
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double mass = q[samples[j]];
        if (mass <= kMassTolerance) {
            t.weights[j] = 0.0;
            ++t.zero_mass_warnings;
            continue;
        }
        t.weights[j] = mass / static_cast<double>(counts[samples[j]]);
        sum += t.weights[j];
        ++nonzero;
    }
    if (nonzero > 0) {
        const double scale = static_cast<double>(nonzero) / sum;
        for (double& w : t.weights) w *= scale;
    }
    return t;
}

void write_weights_csv(const WeightTable& table, std::ostream& out) {
    out << "sample-index,weight\n" << std::setprecision(17);
    for (std::size_t j = 0; j < table.weights.size(); ++j) out << j << ',' << table.weights[j] << '\n';
}

void write_evaluation_csv(const Evaluation& e, std::ostream& out) {
    out << "metric,value\n" << std::setprecision(17);
    out << "samples," << e.samples << '\n';
    out << "correct," << e.correct << '\n';
    out << "accuracy," << e.accuracy << '\n';
    out << "average-loss," << e.average_loss << '\n';
}

}  // namespace grrm
