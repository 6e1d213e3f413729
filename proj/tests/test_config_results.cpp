#include "doctest.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "gffmod/config.hpp"
#include "gffmod/results.hpp"
#include "gffmod/rng.hpp"

using namespace gffmod;
namespace fs = std::filesystem;

TEST_CASE("config parses sections, lists and the seed") {
  const auto c = ExperimentConfig::parse("[run]\nseed = 17\n[sweep]\nT = 0.5, 1, 2\nn = 8 16\nn_disorder = 12\n");
  CHECK(c.seed(std::nullopt) == 17);
  CHECK(c.seed(5) == 5);
  CHECK(c.get_positive_list("sweep.T", {}) == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(c.get_count_list("sweep.n", {}) == std::vector<int>{8, 16});
  CHECK(c.get_count("sweep.n_disorder", 1) == 12);
  CHECK(c.get_count("sweep.missing", 3) == 3);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[run]\n").seed(std::nullopt), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[a]\nx = -1\n").get_positive("a.x", 1.0), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[a]\nx = 0\n").get_count("a.x", 1), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[a]\nx = 1.5\n").get_count("a.x", 1), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[a]\nx = abc\n").get_positive("a.x", 1.0), Error);
  CHECK_THROWS_AS(ExperimentConfig::parse("[a\nx = 1\n"), Error);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/file.cfg"), Error);
}

TEST_CASE("config hash depends on content only") {
  const auto a = ExperimentConfig::parse("[s]\nx = 1\ny = 2\n");
  const auto b = ExperimentConfig::parse("[s]\ny = 2\nx = 1\n");
  const auto c = ExperimentConfig::parse("[s]\nx = 1\ny = 3\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
}

TEST_CASE("results round trip at full precision") {
  Rng rng = make_rng(1);
  std::normal_distribution<double> N;
  ResultTable t{{{"id", ColumnType::Int}, {"x", ColumnType::Real}, {"label", ColumnType::Text}}, {}};
  for (int i = 0; i < 200; ++i) {
    const double x = i == 0 ? 0.1 : i == 1 ? -0.0 : i == 2 ? 1e-300 : std::exp(10.0 * N(rng)) * N(rng);
    t.add_row({std::int64_t{i - 100}, x, std::string(i % 3 ? "plain" : "with, \"quotes\"")});
  }
  const fs::path p = fs::temp_directory_path() / "gffmod_roundtrip.csv";
  write_results(t, p);
  const ResultTable back = read_results(p, t.columns);
  CHECK(back == t);
  fs::remove(p);
}

TEST_CASE("schema errors") {
  ResultTable t{{{"a", ColumnType::Int}, {"b", ColumnType::Real}}, {}};
  t.add_row({std::int64_t{1}, 2.5});
  const std::string csv = to_csv(t);
  CHECK_THROWS_AS(parse_results(csv, {{"a", ColumnType::Int}, {"c", ColumnType::Real}}), SchemaError);
  CHECK_THROWS_AS(parse_results(csv, {{"a", ColumnType::Int}}), SchemaError);
  CHECK_THROWS_AS(parse_results("a,b\nx,1\n", t.columns), SchemaError);
  CHECK_THROWS_AS(t.add_row({2.0, 2.5}), SchemaError);
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), SchemaError);
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1e-300) == "1e-300");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 1e22, 5e-324}) {
    const std::string text = format_real(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("manifest validation") {
  nlohmann::json m{{"command", "sweep"},   {"version", artifact_version()},
                   {"config_hash", "00"},  {"master_seed", 1u},
                   {"threads", 1},         {"config", nlohmann::json::object()},
                   {"outputs", {"a.csv"}}, {"diagnostics", nlohmann::json::object()},
                   {"wall_clock_seconds", 0.5}};
  CHECK(validate_manifest(m).empty());
  auto missing = m;
  missing.erase("config_hash");
  CHECK_FALSE(validate_manifest(missing).empty());
  auto wrong = m;
  wrong["threads"] = "one";
  CHECK_FALSE(validate_manifest(wrong).empty());
  auto negative = m;
  negative["master_seed"] = -3;
  CHECK_FALSE(validate_manifest(negative).empty());
}
