#pragma once

#include "grrm/finite_space.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace grrm {

/// Relative slack under which two expected losses count as tied.
inline constexpr double kTieTolerance = 1e-9;

/// Deterministic classifier feature → predicted label.
struct PosteriorRule {
    FiniteSpace features;
    FiniteSpace labels;
    std::vector<std::size_t> decision;
    /// Label used for features without mass.
    std::size_t fallback = 0;
    std::vector<bool> has_mass;

    std::size_t operator()(std::size_t feature) const { return decision.at(feature); }
};

/// decision(x) minimizes Σ_y L(ŷ,y) Q(x,y); ties go to the first label in
/// space order. Features with zero mass use the minimizer of the loss under
/// the label marginal.
PosteriorRule posterior_rule(const Distribution& q, const LossMatrix& loss);

struct Evaluation {
    std::size_t samples = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    double average_loss = 0.0;
};

/// `samples` are flat test-space indices (feature, label).
Evaluation evaluate(const PosteriorRule& rule, std::span<const std::size_t> samples, const LossMatrix& loss);

struct WeightTable {
    std::vector<double> weights;
    std::size_t zero_mass_warnings = 0;
};

/// Per-sample weight ∝ Q*(z_j) / count(z_j), scaled to mean 1 over the
/// nonzero weights. `samples` are flat test-space indices.
WeightTable export_weights(const Distribution& q, std::span<const std::size_t> samples);

void write_weights_csv(const WeightTable& table, std::ostream& out);
void write_evaluation_csv(const Evaluation& e, std::ostream& out);

}  // namespace grrm
