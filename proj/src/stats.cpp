#include "gffmod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gffmod {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - m) * (x[i] - m);
  return pairwise_sum(d) / static_cast<double>(x.size() - 1);
}

double std_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs two or more paired points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  if (sxx == 0.0) throw std::invalid_argument("linear_fit needs distinct x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A flat response is a perfect fit only if it is exactly flat.
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  if (x.size() > 2) {
    const double rss = std::max(0.0, syy - fit.slope * sxy);
    fit.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::span<const double>> halves;
  for (const auto& c : chains) {
    const std::size_t h = c.size() / 2;
    if (h < 2) throw std::invalid_argument("split_rhat needs chains of length >= 4");
    halves.emplace_back(c.data(), h);
    halves.emplace_back(c.data() + c.size() - h, h);
  }
  const std::size_t len = halves.front().size();
  for (auto& h : halves) h = h.first(std::min(len, h.size()));
  const double n = static_cast<double>(halves.front().size());
  std::vector<double> means, vars;
  for (auto h : halves) {
    means.push_back(mean(h));
    vars.push_back(variance(h));
  }
  const double w = mean(vars);
  const double b = n * variance(means);
  double scale = 1.0;
  for (double m : means) scale = std::max(scale, std::abs(m));
  const double tiny = std::pow(64.0 * std::numeric_limits<double>::epsilon() * scale, 2);
  if (w <= tiny) return b <= n * tiny ? 1.0 : std::numeric_limits<double>::infinity();
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation needs equal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace gffmod
