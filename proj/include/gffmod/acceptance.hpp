#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gffmod {

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  int threads = 0;
  bool quick = false;  // reduced Monte Carlo budgets
  std::filesystem::path out_dir = "verify_out";
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  std::vector<std::string> outputs;  // CSV files written under out_dir
};

inline constexpr int kNumCriteria = 12;

std::string criterion_title(int id);
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// "[PASS] 5 sigma(T) asymptotics (0.1 s): detail"
std::string format_result_line(const CriterionResult& result);

/// The reduced stochastic workload whose CSV bytes are compared across
/// thread counts. Returns the paths written.
std::vector<std::filesystem::path> determinism_workload(std::uint64_t seed, int threads,
                                                        const std::filesystem::path& dir);

}  // namespace gffmod
