#include "gffmod/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gffmod {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("config key '" + key + "': not a number: '" + s + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("config key '" + key + "': not an integer: '" + s + "'");
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      cfg.values_[name] = node.data();
    } else {
      for (const auto& [key, leaf] : node) cfg.values_[name + "." + key] = leaf.data();
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_positive(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parse_double(key, it->second);
  if (!(v > 0.0)) throw Error("config key '" + key + "' must be positive");
  return v;
}

int ExperimentConfig::get_count(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const long long v = parse_integer(key, it->second);
  if (v <= 0 || v > 1'000'000'000) throw Error("config key '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

std::vector<double> ExperimentConfig::get_positive_list(const std::string& key, std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& s : split_list(it->second)) {
    const double v = parse_double(key, s);
    if (!(v > 0.0)) throw Error("config key '" + key + "' must hold positive values");
    out.push_back(v);
  }
  if (out.empty()) throw Error("config key '" + key + "' is an empty list");
  return out;
}

std::vector<int> ExperimentConfig::get_count_list(const std::string& key, std::vector<int> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& s : split_list(it->second)) {
    const long long v = parse_integer(key, s);
    if (v <= 0) throw Error("config key '" + key + "' must hold positive integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw Error("config key '" + key + "' is an empty list");
  return out;
}

std::uint64_t ExperimentConfig::seed(std::optional<std::uint64_t> override_seed) const {
  if (override_seed) return *override_seed;
  const auto it = values_.find("run.seed");
  if (it == values_.end()) throw Error("master seed missing: set run.seed in the config or pass --seed");
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("run.seed must be an unsigned 64-bit integer");
  return v;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [k, v] : values_) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gffmod
