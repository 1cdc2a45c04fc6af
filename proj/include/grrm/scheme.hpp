#pragma once

#include "grrm/finite_space.hpp"
#include "grrm/transition.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace grrm {

/// One type of training data: T maps the test space to the bridge, T̃ maps
/// the training space to the same bridge, and `empirical` is the empirical
/// distribution of that type's samples.
struct BridgeTriple {
    std::string kind;
    Transition test_to_bridge;
    Transition train_to_bridge;
    Distribution empirical;
    double weight = 1.0;
    std::size_t sample_count = 1;

    BridgeTriple(std::string kind, Transition test_to_bridge, Transition train_to_bridge,
                 Distribution empirical, std::size_t sample_count, double weight = 1.0);

    const FiniteSpace& test_space() const { return test_to_bridge.source(); }
    const FiniteSpace& training_space() const { return train_to_bridge.source(); }
    const FiniteSpace& bridge_space() const { return test_to_bridge.target(); }
};

class SupervisionScheme {
public:
    SupervisionScheme(FiniteSpace test_space, std::vector<BridgeTriple> triples, LossMatrix loss);

    const FiniteSpace& test_space() const noexcept { return test_space_; }
    const FiniteSpace& features() const { return test_space_.factor(0); }
    const FiniteSpace& labels() const { return test_space_.factor(1); }
    const std::vector<BridgeTriple>& triples() const noexcept { return triples_; }
    const LossMatrix& loss() const noexcept { return loss_; }
    std::size_t size() const noexcept { return triples_.size(); }

    SupervisionScheme with_weights(std::span<const double> weights) const;

private:
    FiniteSpace test_space_;
    std::vector<BridgeTriple> triples_;
    LossMatrix loss_;
};

/// Test space helper: features × labels.
FiniteSpace test_space(const FiniteSpace& features, const FiniteSpace& labels);

/// Samples are flat indices into the triple's training space throughout.
BridgeTriple standard(const FiniteSpace& test, std::span<const std::size_t> samples);

BridgeTriple noisy_labels(const FiniteSpace& test, double rho_minus, double rho_plus,
                          std::span<const std::size_t> samples);
/// General label-noise kernel T_{Ỹ|Y} (labels → training labels).
BridgeTriple noisy_labels(const FiniteSpace& test, const Transition& label_kernel,
                          std::span<const std::size_t> samples);

/// Multiple labels / weak multi-labels: the training label lives in
/// `coarse_labels`, reached from a test label through a set-valued map or a
/// stochastic kernel.
BridgeTriple coarse_labels(const FiniteSpace& test, const FiniteSpace& coarse_labels,
                           const std::vector<std::vector<std::size_t>>& label_map,
                           std::span<const std::size_t> samples);
BridgeTriple coarse_labels(const FiniteSpace& test, const Transition& label_kernel,
                           std::span<const std::size_t> samples);

/// Power set (nonempty subsets) of a label space, listed by bitmask order,
/// with elements written "{a,b}".
FiniteSpace label_power_set(const FiniteSpace& labels);
/// y ↦ every subset containing y (Table-1 multiple labels).
std::vector<std::vector<std::size_t>> superset_label_map(const FiniteSpace& labels, const FiniteSpace& power_set);
/// Set label y ↦ its nonempty subsets (weak multi-labels); both spaces are
/// the power set.
std::vector<std::vector<std::size_t>> subset_label_map(const FiniteSpace& power_set);

/// Training features x̃ are richer than test features; `feature_kernel` is
/// T_{X|X̃} (training features → test features). T = I.
BridgeTriple privileged(const FiniteSpace& test, const Transition& feature_kernel,
                        std::span<const std::size_t> samples);
/// Pure privileged information: T_{X|X̃} is the deterministic projection of
/// the factorized `extended_features` onto `kept_factors`, which must
/// reproduce the test feature space.
BridgeTriple privileged(const FiniteSpace& test, const FiniteSpace& extended_features,
                        std::span<const std::size_t> kept_factors, std::span<const std::size_t> samples);

/// Training features are corrupted by `corruption` = T_{X̃|X}.
BridgeTriple trs_corrupted(const FiniteSpace& test, const Transition& corruption,
                           std::span<const std::size_t> samples);

/// Both stages are mapped onto a shared representation space.
BridgeTriple representation_adaptation(const FiniteSpace& test, const Transition& test_repr,
                                       const Transition& train_repr, std::span<const std::size_t> samples);

/// Bridge (X, Ỹ): T = I ⊗ label_kernel, T̃ = feature_kernel ⊗ I. Samples
/// live in (training features × training labels).
BridgeTriple combined(const FiniteSpace& test, const Transition& label_kernel, const Transition& feature_kernel,
                      std::span<const std::size_t> samples);

/// Training labels refine test labels: T̃ = I ⊗ T_{Y|Ỹ}.
BridgeTriple precise_labels(const FiniteSpace& test, const Transition& refinement,
                            std::span<const std::size_t> samples);

/// Unlabeled samples (feature indices): T = projection onto X, T̃ = I.
BridgeTriple unlabeled(const FiniteSpace& test, std::span<const std::size_t> feature_samples);

/// Training samples missing feature factor `missing`.
BridgeTriple missing_feature(const FiniteSpace& test, std::size_t missing, std::span<const std::size_t> samples);

SupervisionScheme semi_supervised(const FiniteSpace& test, std::span<const std::size_t> labeled,
                                  std::span<const std::size_t> unlabeled_features);

/// `subsets[0]` is fully observed; `subsets[i]` (i ≥ 1) misses feature factor
/// `missing[i-1]`. Empty subsets are skipped.
SupervisionScheme missing_features(const FiniteSpace& test, std::span<const std::size_t> missing,
                                   const std::vector<std::vector<std::size_t>>& subsets);

struct NoiseRates {
    double rho_minus = 0.0;
    double rho_plus = 0.0;
};
SupervisionScheme variable_quality(const FiniteSpace& test, std::span<const NoiseRates> rates,
                                   const std::vector<std::vector<std::size_t>>& subsets);

/// w_i = √n_i / Σ_j √n_j.
SupervisionScheme default_weights(const SupervisionScheme& scheme);

/// Wraps triples with 0-1 loss on the test labels.
SupervisionScheme make_scheme(const FiniteSpace& test, std::vector<BridgeTriple> triples);

}  // namespace grrm
