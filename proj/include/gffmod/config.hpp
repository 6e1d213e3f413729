#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gffmod/lattice.hpp"

namespace gffmod {

/// Flat key = value configuration with optional [section] headers. Keys are
/// addressed as "section.key". Numeric getters validate positivity.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_positive(const std::string& key, double fallback) const;
  int get_count(const std::string& key, int fallback) const;
  std::vector<double> get_positive_list(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> get_count_list(const std::string& key, std::vector<int> fallback) const;
  /// The master seed: run.seed, required unless an override is supplied.
  std::uint64_t seed(std::optional<std::uint64_t> override_seed) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// FNV-1a 64 over the sorted "key=value" lines, as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gffmod
