#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace grrm::harness {

/// FNV-1a over the compact dump of `config` (object keys sorted).
std::uint64_t fingerprint(const nlohmann::json& config);
std::string fingerprint_hex(const nlohmann::json& config);

/// Shortest round-trip decimal form of v.
std::string format_number(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Writes "# fingerprint <hex>", the header line and the rows.
void write_table(const std::filesystem::path& path, const Table& table, const nlohmann::json& config);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Callers store results by index; the first exception thrown
/// by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace grrm::harness
