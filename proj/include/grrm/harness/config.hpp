#pragma once

#include "grrm/harness/experiments.hpp"
#include "grrm/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace grrm::harness {

nlohmann::json load_json(const std::filesystem::path& path);

/// Command-line overrides applied on top of a config file.
struct Overrides {
    std::optional<std::vector<double>> lambdas;
    std::optional<NormKind> norm;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> threads;
};

/// "0.1" or "0.01,0.1,1"; entries must be positive.
std::vector<double> parse_lambda_grid(const std::string& text);

SolveOptions solve_options_from_json(const nlohmann::json& j, const Overrides& o = {});
NoiseSweepConfig noise_sweep_from_json(const nlohmann::json& j, const Overrides& o = {});
LearningCurveConfig learning_curve_from_json(const nlohmann::json& j, const Overrides& o = {});
/// Relative data paths resolve against `base`.
BenchmarkConfig benchmark_from_json(const nlohmann::json& j, const std::filesystem::path& base, const Overrides& o = {});

/// One GRRM problem described in JSON: a test space, triples with samples,
/// weights, statistic, λ and norm. Kernel and statistic files resolve
/// against `base`.
GrrmProblem problem_from_json(const nlohmann::json& j, const std::filesystem::path& base, const Overrides& o = {});

}  // namespace grrm::harness
