#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "gffmod/lattice.hpp"

namespace gffmod {

enum class ColumnType { Int, Real, Text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
  bool operator==(const Column&) const = default;
};

using Cell = std::variant<std::int64_t, double, std::string>;

/// A typed table written as CSV with a single header line.
struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  bool operator==(const ResultTable&) const = default;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_real(double x);

std::string to_csv(const ResultTable& table);
void write_results(const ResultTable& table, const std::filesystem::path& path);
/// Reads a CSV written by write_results. The header must match the schema
/// names exactly and every cell must parse as its column type.
ResultTable read_results(const std::filesystem::path& path, const std::vector<Column>& schema);
ResultTable parse_results(const std::string& text, const std::vector<Column>& schema);

/// Version string embedded in manifests.
std::string artifact_version();

/// Returns an empty string when the manifest has every required field with
/// the right type, otherwise the first problem found.
std::string validate_manifest(const nlohmann::json& manifest);

void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& path);

}  // namespace gffmod
