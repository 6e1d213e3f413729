#include "gffmod/results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gffmod {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw SchemaError("row width does not match the table header");
  for (std::size_t i = 0; i < row.size(); ++i) {
    const bool ok = (columns[i].type == ColumnType::Int && std::holds_alternative<std::int64_t>(row[i])) ||
                    (columns[i].type == ColumnType::Real && std::holds_alternative<double>(row[i])) ||
                    (columns[i].type == ColumnType::Text && std::holds_alternative<std::string>(row[i]));
    if (!ok) throw SchemaError("cell type does not match column '" + columns[i].name + "'");
  }
  rows.push_back(std::move(row));
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i].name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) out += format_real(v);
            else if constexpr (std::is_same_v<V, std::int64_t>) out += std::to_string(v);
            else out += quote(v);
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_results(const ResultTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_csv(table);
}

ResultTable parse_results(const std::string& text, const std::vector<Column>& schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty results file");
  const auto header = split_csv_line(line);
  std::vector<std::string> expected;
  for (const auto& c : schema) expected.push_back(c.name);
  if (header != expected) {
    std::string got, want;
    for (const auto& h : header) got += (got.empty() ? "" : ",") + h;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw SchemaError("header mismatch: expected '" + want + "', found '" + got + "'");
  }
  ResultTable table{schema, {}};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != schema.size())
      throw SchemaError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells");
    std::vector<Cell> row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& s = cells[i];
      const char* end = s.data() + s.size();
      if (schema[i].type == ColumnType::Int) {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || p != end) throw SchemaError("line " + std::to_string(line_no) + ": bad integer in '" + schema[i].name + "'");
        row.emplace_back(v);
      } else if (schema[i].type == ColumnType::Real) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || p != end) throw SchemaError("line " + std::to_string(line_no) + ": bad number in '" + schema[i].name + "'");
        row.emplace_back(v);
      } else {
        row.emplace_back(s);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable read_results(const std::filesystem::path& path, const std::vector<Column>& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_results(ss.str(), schema);
}

std::string artifact_version() { return "gffmod 0.1.0"; }

std::string validate_manifest(const nlohmann::json& m) {
  if (!m.is_object()) return "manifest must be an object";
  struct Field {
    const char* name;
    nlohmann::json::value_t type;
  };
  using VT = nlohmann::json::value_t;
  const Field required[] = {{"command", VT::string},        {"version", VT::string},
                            {"config_hash", VT::string},    {"master_seed", VT::number_unsigned},
                            {"threads", VT::number_unsigned}, {"config", VT::object},
                            {"outputs", VT::array},         {"diagnostics", VT::object},
                            {"wall_clock_seconds", VT::number_float}};
  for (const auto& f : required) {
    if (!m.contains(f.name)) return std::string("missing field '") + f.name + "'";
    const auto t = m.at(f.name).type();
    const bool ok = t == f.type || (f.type == VT::number_unsigned && t == VT::number_integer &&
                                    m.at(f.name).get<long long>() >= 0);
    if (!ok) return std::string("field '") + f.name + "' has the wrong type";
  }
  for (const auto& o : m.at("outputs"))
    if (!o.is_string()) return "outputs must list file names";
  return {};
}

void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& path) {
  const std::string problem = validate_manifest(manifest);
  if (!problem.empty()) throw SchemaError("invalid manifest: " + problem);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace gffmod
