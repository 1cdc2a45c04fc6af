#include "grrm/harness/data.hpp"

#include "grrm/scheme.hpp"
#include "grrm/transition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace grrm::harness {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_number(const std::string& s, const std::string& column) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::runtime_error("ingest_csv: non-numeric value '" + s + "' in column " + column);
    return v;
}

}  // namespace

std::vector<std::size_t> Dataset::samples(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(sample(r));
    return out;
}

std::vector<std::size_t> Dataset::features_of(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(feature_index.at(r));
    return out;
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::runtime_error("csv: missing column " + name);
    return static_cast<std::size_t>(it - names.begin());
}

CsvTable read_csv(const std::string& path, bool header, std::span<const std::string> names) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        if (first && header) {
            t.names = std::move(fields);
            first = false;
            continue;
        }
        first = false;
        t.rows.push_back(std::move(fields));
    }
    if (!header) t.names.assign(names.begin(), names.end());
    if (t.names.empty()) throw std::runtime_error("csv: no column names for " + path);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != t.names.size())
            throw std::runtime_error("csv: row " + std::to_string(i + 1) + " has " + std::to_string(t.rows[i].size()) +
                                     " fields, expected " + std::to_string(t.names.size()));
    return t;
}

std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("quantile_edges: bins must be positive");
    if (values.empty()) throw std::invalid_argument("quantile_edges: no values");
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    const double n1 = static_cast<double>(values.size() - 1);
    for (std::size_t k = 1; k < bins; ++k) {
        const double h = n1 * static_cast<double>(k) / static_cast<double>(bins);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        edges.push_back(values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]));
    }
    return edges;
}

std::size_t bin_of(double v, std::span<const double> edges) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

Dataset ingest_csv(const std::string& path, const CsvSchema& schema, std::span<const std::size_t> train_rows) {
    return ingest_table(read_csv(path, schema.header, schema.names), schema, train_rows);
}

Dataset ingest_table(const CsvTable& table, const CsvSchema& schema, std::span<const std::size_t> train_rows) {
    if (schema.features.empty()) throw std::invalid_argument("ingest_csv: no feature columns");
    const std::size_t label_col = table.column(schema.label);
    std::vector<std::size_t> train(train_rows.begin(), train_rows.end());
    if (train.empty())
        for (std::size_t r = 0; r < table.rows.size(); ++r) train.push_back(r);
    for (auto r : train)
        if (r >= table.rows.size()) throw std::out_of_range("ingest_csv: training row out of range");

    Dataset d;
    std::vector<FiniteSpace> column_spaces;
    std::vector<std::vector<std::size_t>> codes(schema.features.size(), std::vector<std::size_t>(table.rows.size()));
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
        const auto& spec = schema.features[f];
        const std::size_t col = table.column(spec.name);
        if (spec.kind == ColumnSpec::Kind::Numeric) {
            std::vector<double> values;
            for (auto r : train) values.push_back(parse_number(table.rows[r][col], spec.name));
            auto edges = quantile_edges(values, spec.bins);
            std::vector<std::string> names;
            for (std::size_t b = 1; b <= spec.bins; ++b) names.push_back("b" + std::to_string(b));
            column_spaces.push_back(make_space(names));
            for (std::size_t r = 0; r < table.rows.size(); ++r)
                codes[f][r] = bin_of(parse_number(table.rows[r][col], spec.name), edges);
            d.bin_edges.push_back(std::move(edges));
        } else {
            std::map<std::string, std::size_t> counts;
            for (auto r : train) ++counts[table.rows[r][col]];
            std::vector<std::string> names;
            std::string fallback;
            std::size_t best = 0;
            for (const auto& [name, count] : counts) {
                names.push_back(name);
                if (count > best) {
                    best = count;
                    fallback = name;
                }
            }
            const auto space = make_space(names);
            std::size_t unknown = 0;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const auto& v = table.rows[r][col];
                if (space.contains(v)) {
                    codes[f][r] = space.index_of(v);
                } else {
                    codes[f][r] = space.index_of(fallback);
                    ++unknown;
                }
            }
            if (unknown > 0)
                d.warnings.push_back("column " + spec.name + ": " + std::to_string(unknown) +
                                     " rows with unseen categories mapped to '" + fallback + "'");
            column_spaces.push_back(space);
            d.bin_edges.emplace_back();
        }
    }

    double product = 1.0;
    for (const auto& s : column_spaces) product *= static_cast<double>(s.size());
    d.feature_index.resize(table.rows.size());
    if (product <= static_cast<double>(schema.max_product)) {
        d.features = product_space(column_spaces);
        std::vector<std::size_t> parts(column_spaces.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            for (std::size_t f = 0; f < parts.size(); ++f) parts[f] = codes[f][r];
            d.feature_index[r] = d.features.compose(parts);
        }
    } else {
        // Observed tuples only, in first-seen order of rows.
        std::map<std::vector<std::size_t>, std::size_t> seen;
        std::vector<std::vector<std::size_t>> tuples;
        std::vector<std::string> names;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::vector<std::size_t> key(column_spaces.size());
            for (std::size_t f = 0; f < key.size(); ++f) key[f] = codes[f][r];
            auto [it, inserted] = seen.emplace(key, tuples.size());
            if (inserted) {
                std::string name = "(";
                for (std::size_t f = 0; f < key.size(); ++f)
                    name += (f ? "," : "") + column_spaces[f].element(key[f]);
                names.push_back(name + ")");
                tuples.push_back(key);
            }
            d.feature_index[r] = it->second;
        }
        d.features = make_space(names);
        Eigen::Index width = 0;
        for (const auto& s : column_spaces) width += static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tuples.size()), width);
        for (std::size_t t = 0; t < tuples.size(); ++t) {
            Eigen::Index offset = 0;
            for (std::size_t f = 0; f < column_spaces.size(); ++f) {
                e(static_cast<Eigen::Index>(t), offset + static_cast<Eigen::Index>(tuples[t][f])) = 1.0;
                offset += static_cast<Eigen::Index>(column_spaces[f].size());
            }
        }
        d.embedding = std::move(e);
        d.warnings.push_back("feature product exceeds " + std::to_string(schema.max_product) +
                             "; using observed tuples");
    }
    d.space = test_space(d.features, binary_labels());
    d.label_index.resize(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) d.label_index[r] = table.rows[r][label_col] == schema.positive_label ? 1 : 0;
    return d;
}

}  // namespace grrm::harness
