#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gffmod/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
  gffmod::AcceptanceOptions opt;
  std::vector<int> only;
  std::string out = "acceptance_out";
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quick", opt.quick, "reduced Monte Carlo budgets");
  app.add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, gffmod::kNumCriteria));
  app.add_option("--out", out, "directory for CSV outputs");
  CLI11_PARSE(app, argc, argv);
  opt.out_dir = out;
  if (only.empty())
    for (int i = 1; i <= gffmod::kNumCriteria; ++i) only.push_back(i);
  int failed = 0;
  for (int id : only) {
    const auto r = gffmod::run_criterion(id, opt);
    std::printf("%s\n", gffmod::format_result_line(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(only.size()) - failed, only.size());
  return failed == 0 ? 0 : 1;
}
