#pragma once

#include "grrm/finite_space.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace grrm::harness {

struct ColumnSpec {
    enum class Kind { Categorical, Numeric };
    std::string name;
    Kind kind = Kind::Categorical;
    /// Quantile bins for numeric columns.
    std::size_t bins = 8;
};

struct CsvSchema {
    std::vector<ColumnSpec> features;
    std::string label;
    /// Rows whose label equals this value become +1, all others −1.
    std::string positive_label;
    bool header = true;
    /// Column names when the file has no header row.
    std::vector<std::string> names;
    /// Largest product of column sizes kept as a factorized feature space.
    std::size_t max_product = 200000;
};

/// Rows of a CSV file mapped onto a finite features × {−1,+1} space.
struct Dataset {
    FiniteSpace features;
    FiniteSpace space;
    /// Per row: feature index and label index (0 = −1, 1 = +1).
    std::vector<std::size_t> feature_index;
    std::vector<std::size_t> label_index;
    /// One-hot rows per feature; set when features are observed tuples
    /// rather than the full product of column spaces.
    std::optional<Eigen::MatrixXd> embedding;
    /// Numeric bin edges per feature column (empty for categorical ones).
    std::vector<std::vector<double>> bin_edges;
    std::vector<std::string> warnings;

    std::size_t rows() const noexcept { return feature_index.size(); }
    std::size_t sample(std::size_t row) const { return feature_index.at(row) * 2 + label_index.at(row); }
    std::vector<std::size_t> samples(std::span<const std::size_t> rows) const;
    std::vector<std::size_t> features_of(std::span<const std::size_t> rows) const;
};

/// Raw cells of a CSV file; quoted fields may hold commas and doubled quotes.
struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path, bool header, std::span<const std::string> names = {});

/// Categories and numeric bin edges come from `train_rows` only (every row
/// when empty). Other rows with unseen categories map to the most frequent
/// training category, with a warning.
Dataset ingest_csv(const std::string& path, const CsvSchema& schema, std::span<const std::size_t> train_rows = {});
Dataset ingest_table(const CsvTable& table, const CsvSchema& schema, std::span<const std::size_t> train_rows = {});

/// Type-7 quantile edges at k/bins, k = 1…bins−1.
std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins);
/// Bin position of v: the number of edges strictly below v.
std::size_t bin_of(double v, std::span<const double> edges);

}  // namespace grrm::harness
