#include "grrm/scheme.hpp"

#include <cmath>
#include <stdexcept>

namespace grrm {

BridgeTriple::BridgeTriple(std::string kind_, Transition test_to_bridge_, Transition train_to_bridge_,
                           Distribution empirical_, std::size_t sample_count_, double weight_)
    : kind(std::move(kind_)),
      test_to_bridge(std::move(test_to_bridge_)),
      train_to_bridge(std::move(train_to_bridge_)),
      empirical(std::move(empirical_)),
      weight(weight_),
      sample_count(sample_count_) {
    if (!(test_to_bridge.target() == train_to_bridge.target()))
        throw std::invalid_argument("BridgeTriple(" + kind + "): T and T~ have different bridge spaces");
    if (!(empirical.space() == train_to_bridge.source()))
        throw std::invalid_argument("BridgeTriple(" + kind + "): empirical data not over the training space");
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("BridgeTriple(" + kind + "): weight must be positive");
    if (sample_count < 1) throw std::invalid_argument("BridgeTriple(" + kind + "): needs at least one sample");
}

SupervisionScheme::SupervisionScheme(FiniteSpace test_space, std::vector<BridgeTriple> triples, LossMatrix loss)
    : test_space_(std::move(test_space)), triples_(std::move(triples)), loss_(std::move(loss)) {
    if (test_space_.factor_count() != 2)
        throw std::invalid_argument("SupervisionScheme: test space must be features x labels");
    if (triples_.empty()) throw std::invalid_argument("SupervisionScheme: no training data types");
    for (const auto& t : triples_) {
        if (!(t.test_space() == test_space_))
            throw std::invalid_argument("SupervisionScheme: triple '" + t.kind + "' has a different test space");
    }
    if (!(loss_.true_space() == test_space_.factor(1)))
        throw std::invalid_argument("SupervisionScheme: loss is not over the test labels");
}

SupervisionScheme SupervisionScheme::with_weights(std::span<const double> weights) const {
    if (weights.size() != triples_.size()) throw std::invalid_argument("with_weights: one weight per triple");
    std::vector<BridgeTriple> out = triples_;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("with_weights: weights must be positive");
        out[i].weight = weights[i];
    }
    return {test_space_, std::move(out), loss_};
}

FiniteSpace test_space(const FiniteSpace& features, const FiniteSpace& labels) {
    return product_space(features, labels);
}

namespace {

void require_test(const FiniteSpace& test) {
    if (test.factor_count() != 2) throw std::invalid_argument("test space must be features x labels");
}

const FiniteSpace& feats(const FiniteSpace& test) { return test.factor(0); }
const FiniteSpace& labs(const FiniteSpace& test) { return test.factor(1); }

BridgeTriple make_triple(std::string kind, Transition t, Transition tt, std::span<const std::size_t> samples) {
    Distribution emp = empirical_distribution(samples, tt.source());
    return {std::move(kind), std::move(t), std::move(tt), std::move(emp), samples.size()};
}

}  // namespace

BridgeTriple standard(const FiniteSpace& test, std::span<const std::size_t> samples) {
    require_test(test);
    return make_triple("standard", identity(test), identity(test), samples);
}

BridgeTriple noisy_labels(const FiniteSpace& test, const Transition& label_kernel,
                          std::span<const std::size_t> samples) {
    require_test(test);
    if (!(label_kernel.source() == labs(test)))
        throw std::invalid_argument("noisy_labels: kernel source must be the test labels");
    Transition t = parallel(identity(feats(test)), label_kernel);
    Transition tt = identity(t.target());
    return make_triple("noisy-labels", std::move(t), std::move(tt), samples);
}

BridgeTriple noisy_labels(const FiniteSpace& test, double rho_minus, double rho_plus,
                          std::span<const std::size_t> samples) {
    require_test(test);
    if (labs(test).size() != 2)
        throw std::invalid_argument("noisy_labels: two-rate constructor needs binary labels; pass a kernel instead");
    return noisy_labels(test, label_noise(labs(test), rho_minus, rho_plus), samples);
}

BridgeTriple coarse_labels(const FiniteSpace& test, const Transition& label_kernel,
                           std::span<const std::size_t> samples) {
    BridgeTriple t = noisy_labels(test, label_kernel, samples);
    t.kind = "coarse-labels";
    return t;
}

BridgeTriple coarse_labels(const FiniteSpace& test, const FiniteSpace& coarse,
                           const std::vector<std::vector<std::size_t>>& label_map,
                           std::span<const std::size_t> samples) {
    require_test(test);
    return coarse_labels(test, set_valued(labs(test), coarse, label_map), samples);
}

FiniteSpace label_power_set(const FiniteSpace& labels) {
    const std::size_t n = labels.size();
    if (n > 16) throw std::invalid_argument("label_power_set: too many labels");
    std::vector<std::string> sets;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::string s = "{";
        bool first = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (!(mask & (std::size_t{1} << k))) continue;
            if (!first) s += ',';
            s += labels.element(k);
            first = false;
        }
        sets.push_back(s + "}");
    }
    return make_space(std::move(sets));
}

std::vector<std::vector<std::size_t>> superset_label_map(const FiniteSpace& labels, const FiniteSpace& power_set) {
    const std::size_t n = labels.size();
    if (power_set.size() != (std::size_t{1} << n) - 1)
        throw std::invalid_argument("superset_label_map: not the power set of these labels");
    std::vector<std::vector<std::size_t>> map(n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask)
            if (mask & (std::size_t{1} << y)) map[y].push_back(mask - 1);
    return map;
}

std::vector<std::vector<std::size_t>> subset_label_map(const FiniteSpace& power_set) {
    const std::size_t count = power_set.size();
    std::vector<std::vector<std::size_t>> map(count);
    for (std::size_t mask = 1; mask <= count; ++mask)
        for (std::size_t sub = 1; sub <= count; ++sub)
            if ((sub & mask) == sub) map[mask - 1].push_back(sub - 1);
    return map;
}

BridgeTriple privileged(const FiniteSpace& test, const Transition& feature_kernel,
                        std::span<const std::size_t> samples) {
    require_test(test);
    if (!(feature_kernel.target() == feats(test)))
        throw std::invalid_argument("privileged: kernel must map training features onto test features");
    Transition tt = parallel(feature_kernel, identity(labs(test)));
    return make_triple("privileged", identity(test), std::move(tt), samples);
}

BridgeTriple privileged(const FiniteSpace& test, const FiniteSpace& extended_features,
                        std::span<const std::size_t> kept_factors, std::span<const std::size_t> samples) {
    require_test(test);
    Transition proj = projection(extended_features, kept_factors);
    if (!(proj.target() == feats(test)))
        throw std::invalid_argument("privileged: kept factors do not reproduce the test features");
    return privileged(test, proj, samples);
}

BridgeTriple trs_corrupted(const FiniteSpace& test, const Transition& corruption,
                           std::span<const std::size_t> samples) {
    require_test(test);
    if (!(corruption.source() == feats(test)))
        throw std::invalid_argument("trs_corrupted: corruption must start at the test features");
    Transition t = parallel(corruption, identity(labs(test)));
    Transition tt = identity(t.target());
    return make_triple("trs-corrupted", std::move(t), std::move(tt), samples);
}

BridgeTriple representation_adaptation(const FiniteSpace& test, const Transition& test_repr,
                                       const Transition& train_repr, std::span<const std::size_t> samples) {
    require_test(test);
    if (!(test_repr.source() == test))
        throw std::invalid_argument("representation_adaptation: test map must start at the test space");
    return make_triple("representation", test_repr, train_repr, samples);
}

BridgeTriple combined(const FiniteSpace& test, const Transition& label_kernel, const Transition& feature_kernel,
                      std::span<const std::size_t> samples) {
    require_test(test);
    if (!(label_kernel.source() == labs(test)))
        throw std::invalid_argument("combined: label kernel must start at the test labels");
    if (!(feature_kernel.target() == feats(test)))
        throw std::invalid_argument("combined: feature kernel must end at the test features");
    Transition t = parallel(identity(feats(test)), label_kernel);
    Transition tt = parallel(feature_kernel, identity(label_kernel.target()));
    return make_triple("combined", std::move(t), std::move(tt), samples);
}

BridgeTriple precise_labels(const FiniteSpace& test, const Transition& refinement,
                            std::span<const std::size_t> samples) {
    require_test(test);
    if (!(refinement.target() == labs(test)))
        throw std::invalid_argument("precise_labels: refinement must end at the test labels");
    Transition tt = parallel(identity(feats(test)), refinement);
    return make_triple("precise-labels", identity(test), std::move(tt), samples);
}

BridgeTriple unlabeled(const FiniteSpace& test, std::span<const std::size_t> feature_samples) {
    require_test(test);
    const std::size_t keep[] = {0};
    return make_triple("unlabeled", projection(test, keep), identity(feats(test)), feature_samples);
}

BridgeTriple missing_feature(const FiniteSpace& test, std::size_t missing, std::span<const std::size_t> samples) {
    require_test(test);
    const FiniteSpace& x = feats(test);
    const std::size_t r = x.factorized() ? x.factor_count() : 1;
    if (missing >= r) throw std::out_of_range("missing_feature: no such feature factor");
    Transition t = [&] {
        if (r == 1) {
            const std::size_t keep[] = {1};
            return projection(test, keep);
        }
        std::vector<std::size_t> kept;
        for (std::size_t k = 0; k < r; ++k)
            if (k != missing) kept.push_back(k);
        return parallel(projection(x, kept), identity(labs(test)));
    }();
    Transition tt = identity(t.target());
    return make_triple("missing-feature", std::move(t), std::move(tt), samples);
}

SupervisionScheme semi_supervised(const FiniteSpace& test, std::span<const std::size_t> labeled,
                                  std::span<const std::size_t> unlabeled_features) {
    std::vector<BridgeTriple> triples;
    if (!labeled.empty()) triples.push_back(standard(test, labeled));
    if (!unlabeled_features.empty()) triples.push_back(unlabeled(test, unlabeled_features));
    return make_scheme(test, std::move(triples));
}

SupervisionScheme missing_features(const FiniteSpace& test, std::span<const std::size_t> missing,
                                   const std::vector<std::vector<std::size_t>>& subsets) {
    if (subsets.size() != missing.size() + 1)
        throw std::invalid_argument("missing_features: need one sample subset per missing factor plus one");
    std::vector<BridgeTriple> triples;
    if (!subsets[0].empty()) triples.push_back(standard(test, subsets[0]));
    for (std::size_t i = 0; i < missing.size(); ++i)
        if (!subsets[i + 1].empty()) triples.push_back(missing_feature(test, missing[i], subsets[i + 1]));
    return make_scheme(test, std::move(triples));
}

SupervisionScheme variable_quality(const FiniteSpace& test, std::span<const NoiseRates> rates,
                                   const std::vector<std::vector<std::size_t>>& subsets) {
    if (rates.size() != subsets.size()) throw std::invalid_argument("variable_quality: one rate pair per subset");
    std::vector<BridgeTriple> triples;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (subsets[i].empty()) continue;
        if (rates[i].rho_minus == 0.0 && rates[i].rho_plus == 0.0)
            triples.push_back(standard(test, subsets[i]));
        else
            triples.push_back(noisy_labels(test, rates[i].rho_minus, rates[i].rho_plus, subsets[i]));
    }
    return make_scheme(test, std::move(triples));
}

SupervisionScheme default_weights(const SupervisionScheme& scheme) {
    std::vector<double> w;
    double total = 0.0;
    for (const auto& t : scheme.triples()) {
        w.push_back(std::sqrt(static_cast<double>(t.sample_count)));
        total += w.back();
    }
    for (auto& v : w) v /= total;
    return scheme.with_weights(w);
}

SupervisionScheme make_scheme(const FiniteSpace& test, std::vector<BridgeTriple> triples) {
    require_test(test);
    return {test, std::move(triples), LossMatrix::zero_one(labs(test))};
}

}  // namespace grrm
