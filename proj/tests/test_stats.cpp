#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "gffmod/parallel.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/stats.hpp"

using namespace gffmod;

TEST_CASE("pairwise sum is exact on integers and order defined") {
  std::vector<double> x(1000);
  for (int i = 0; i < 1000; ++i) x[i] = i;
  CHECK(pairwise_sum(x) == 499500.0);
  CHECK(mean(x) == 499.5);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("variance and standard error") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(std_error(x) == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(variance(std::vector<double>{3.0}) == 0.0);
}

TEST_CASE("linear fit recovers an exact line") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  const LinearFit flat = linear_fit(x, std::vector<double>{2, 2, 2, 2});
  CHECK(flat.slope == 0.0);
  CHECK(flat.r2 == 0.0);
}

TEST_CASE("split R-hat") {
  CHECK(split_rhat({{1, 1, 1, 1}, {1, 1, 1, 1}}) == 1.0);
  CHECK(split_rhat({{1, 1, 1, 1}, {2, 2, 2, 2}}) == std::numeric_limits<double>::infinity());
  const std::vector<std::vector<double>> frozen(4, std::vector<double>(20, 0.39590938674988585));
  CHECK(split_rhat(frozen) == 1.0);
  Rng rng = make_rng(3);
  std::normal_distribution<double> N;
  std::vector<std::vector<double>> iid(4, std::vector<double>(2000));
  for (auto& c : iid)
    for (double& v : c) v = N(rng);
  CHECK(split_rhat(iid) < 1.01);
  auto shifted = iid;
  for (double& v : shifted[0]) v += 3.0;
  CHECK(split_rhat(shifted) > 1.5);
}

TEST_CASE("total variation") {
  const std::vector<double> p{0.5, 0.5, 0.0}, q{0.0, 0.5, 0.5};
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
  CHECK(total_variation(p, p) == 0.0);
}

TEST_CASE("derived seeds depend on order and master") {
  CHECK(derive_seed(1, {1, 2}) != derive_seed(1, {2, 1}));
  CHECK(derive_seed(1, {1}) != derive_seed(2, {1}));
  CHECK(derive_seed(5, {3, 4}) == derive_seed(5, {3, 4}));
  Rng a = make_rng(9, {1}), b = make_rng(9, {1});
  CHECK(a() == b());
}

TEST_CASE("parallel map is schedule independent") {
  auto f = [](std::size_t i) {
    Rng r = make_rng(42, {i});
    return std::uniform_real_distribution<double>()(r);
  };
  const auto one = parallel_map(100, f, 1);
  const auto many = parallel_map(100, f, 7);
  CHECK(one == many);
  CHECK_THROWS_AS(parallel_map(10, [](std::size_t i) -> int { if (i == 5) throw std::runtime_error("x"); return 0; }, 3),
                  std::runtime_error);
}
