#pragma once

#include <span>
#include <vector>

namespace gffmod {

/// Fixed binary-tree summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> x);
double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two values.
double variance(std::span<const double> x);
/// Standard error of the mean.
double std_error(std::span<const double> x);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Split-chain potential scale reduction. Each chain is cut in halves and the
/// halves are treated as separate chains. Identical constant traces give 1,
/// constant traces at different levels give +infinity.
double split_rhat(const std::vector<std::vector<double>>& chains);

/// Total variation distance between two probability vectors of equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace gffmod
