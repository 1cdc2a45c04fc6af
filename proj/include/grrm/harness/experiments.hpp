#pragma once

#include "grrm/harness/data.hpp"
#include "grrm/harness/io.hpp"
#include "grrm/harness/tictactoe.hpp"
#include "grrm/objective.hpp"
#include "grrm/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace grrm::harness {

struct LambdaChoice {
    double lambda = 0.0;
    std::vector<double> validation_accuracy;
};

/// Grid value with the highest validation accuracy; ties go to the smallest
/// λ. Accuracies within 1e-12 of each other count as equal.
LambdaChoice select_lambda(std::span<const double> grid, const std::function<double(double)>& validation_accuracy);

/// Statistic for a bridge space by name: "indicator" or "one-hot-affine".
/// One-hot-affine needs a features × {−1,+1} bridge.
Statistic make_statistic(const std::string& name, const FiniteSpace& bridge,
                         const std::optional<Eigen::MatrixXd>& embedding = std::nullopt);

/// Settings shared by the experiments.
struct SolveOptions {
    std::vector<double> lambdas{1e-3};
    /// Share of each training group held out for λ selection when more
    /// than one λ is given.
    double validation_fraction = 0.2;
    NormKind norm = NormKind::MaxAbs;
    std::string statistic = "indicator";
    std::size_t threads = 0;
    std::vector<std::uint64_t> seeds = default_seeds();

    static std::vector<std::uint64_t> default_seeds(std::size_t n = 20);
};

struct RunRecord {
    std::string method;
    /// Grid value (noise sweep) or number of added samples (learning curve).
    double param = 0.0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double lambda = 0.0;
};

struct SummaryRecord {
    std::string method;
    double param = 0.0;
    double mean = 0.0;
    /// Sample standard deviation over repetitions.
    double stddev = 0.0;
    std::size_t reps = 0;
};

struct ExperimentResult {
    std::string name;
    nlohmann::json config;
    std::vector<RunRecord> runs;
    std::vector<SummaryRecord> summary;
    nlohmann::json extra = nlohmann::json::object();

    const SummaryRecord& find(const std::string& method, double param) const;
    /// Per-seed accuracies of one (method, param) cell in seed order.
    std::vector<double> accuracies(const std::string& method, double param) const;
};

/// Groups runs by (method, param) in first-appearance order.
std::vector<SummaryRecord> summarize(const std::vector<RunRecord>& runs);

/// Files: <name>.csv (summary), <name>_runs.csv and summary.json.
void write_result(const ExperimentResult& r, const std::filesystem::path& dir);

struct NoiseSweepConfig {
    std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    double rho_minus_ratio = 0.5;
    std::size_t train_size = 500;
    std::vector<std::size_t> window = upper_left_block();
    SolveOptions solve;

    nlohmann::json to_json() const;
};

/// Methods "benchmark", "naive" and "grrm"; param = ρ+ = η.
ExperimentResult noise_sweep_experiment(const NoiseSweepConfig& config);

struct LearningCurveConfig {
    std::size_t base = 80;
    std::vector<std::size_t> steps{80, 160, 240};
    double rho_minus = 0.1;
    double rho_plus = 0.3;
    std::vector<std::size_t> test_window = upper_left_block();
    std::vector<std::size_t> adaptation_window = middle_column();
    std::vector<std::size_t> privileged_window = without_corners();
    SolveOptions solve;

    nlohmann::json to_json() const;
};

/// Methods "standard", "noisy-labels", "domain-adaptation", "privileged";
/// param = samples added to that type. The added = 0 point is one shared
/// solve reported under every method.
ExperimentResult learning_curve_experiment(const LearningCurveConfig& config);

struct BenchmarkConfig {
    std::string data_path;
    CsvSchema schema;
    double train_fraction = 0.5;
    double rho_minus = 0.1;
    double rho_plus = 0.3;
    double labeled_fraction = 0.05;
    double unlabeled_fraction = 0.30;
    bool semi_supervised = true;
    SolveOptions solve;

    nlohmann::json to_json() const;
};

struct PairedInterval {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n = 0;
};

/// Two-sided t interval for the mean of a − b over paired samples.
PairedInterval paired_interval(std::span<const double> a, std::span<const double> b, double level = 0.95);

/// Noisy labels: methods "naive-erm" and "grrm-noisy-labels".
/// Semi-supervision: "supervised-erm" and "grrm-semi-supervised".
/// param = 0 throughout; paired intervals go to `extra`.
ExperimentResult benchmark_experiment(const BenchmarkConfig& config);

}  // namespace grrm::harness
