#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gffmod/acceptance.hpp"
#include "gffmod/config.hpp"
#include "gffmod/gff.hpp"
#include "gffmod/iv_gff.hpp"
#include "gffmod/level_lines.hpp"
#include "gffmod/parallel.hpp"
#include "gffmod/peierls.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/reconstruction.hpp"
#include "gffmod/results.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/sine_gordon.hpp"
#include "gffmod/theta.hpp"

using namespace gffmod;
using nlohmann::json;
namespace fs = std::filesystem;
using CT = ColumnType;

namespace {

struct Common {
  std::string config_path;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quick = false;
};

Cell I(long long v) { return Cell{static_cast<std::int64_t>(v)}; }
Cell R(double v) { return Cell{v}; }
Cell S(std::string v) { return Cell{std::move(v)}; }
std::string hex(std::uint64_t s) { return fmt::format("{:#018x}", s); }

// Keys each command accepts, besides run.seed and run.threads.
const std::map<std::string, std::set<std::string>> kKeys{
    {"sample", {"n", "T", "boundary"}},
    {"reconstruct", {"n", "T", "chains", "burn_in", "samples", "thin"}},
    {"sweep", {"T", "n", "boundary", "n_disorder", "pairs", "burn_in", "samples", "thin"}},
    {"peierls", {"n", "T", "boundary", "n_disorder", "pairs", "burn_in", "samples", "thin"}},
    {"theta-check", {}},
    {"sine-gordon", {"beta", "z", "n", "disorder", "T", "n_disorder", "burn_in", "samples", "thin"}},
    {"level-line", {"n", "T", "chains", "burn_in", "samples", "thin"}},
    {"verify", {}},
};

std::string section_of(const std::string& command) {
  std::string s = command;
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

class Run {
 public:
  Run(std::string command, const Common& common) : command_(std::move(command)), common_(common) {
    if (!common.config_path.empty()) cfg_ = ExperimentConfig::load(common.config_path);
    const std::string sec = section_of(command_);
    for (const auto& [key, value] : cfg_.values()) {
      if (key == "run.seed" || key == "run.threads") continue;
      const auto dot = key.find('.');
      const std::string head = key.substr(0, dot), tail = dot == std::string::npos ? "" : key.substr(dot + 1);
      if (head != sec || !kKeys.at(command_).count(tail)) throw Error("unknown config key '" + key + "' for " + command_);
    }
    if (common.threads) threads_ = *common.threads;
    else if (cfg_.has("run.threads")) threads_ = cfg_.get_count("run.threads", 1);
    else threads_ = default_threads();
    if (threads_ <= 0) throw Error("thread count must be positive");
    set_default_threads(threads_);
    start_ = std::chrono::steady_clock::now();
  }

  std::uint64_t seed(std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (common_.seed) return *common_.seed;
    if (!cfg_.has("run.seed") && fallback) return *fallback;
    return cfg_.seed(std::nullopt);
  }
  int threads() const { return threads_; }
  bool quick() const { return common_.quick; }
  fs::path out_dir() const { return common_.out; }

  double real(const std::string& key, double fallback) const { return cfg_.get_positive(key_of(key), fallback); }
  int count(const std::string& key, int fallback) const { return cfg_.get_count(key_of(key), fallback); }
  std::string text(const std::string& key, const std::string& fallback) const {
    return cfg_.get_string(key_of(key), fallback);
  }
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
    return cfg_.get_positive_list(key_of(key), std::move(fallback));
  }
  std::vector<int> counts(const std::string& key, std::vector<int> fallback) const {
    return cfg_.get_count_list(key_of(key), std::move(fallback));
  }
  BoundaryCondition boundary(int n) const {
    const std::string b = text("boundary", "dirichlet");
    if (b == "dirichlet") return BoundaryCondition::dirichlet();
    if (b == "free") return BoundaryCondition::free({n, n});
    throw Error("boundary must be 'dirichlet' or 'free', got '" + b + "'");
  }
  ChainConfig chain(int burn_in, int samples, int thin) const {
    return {count("burn_in", burn_in), count("samples", samples), count("thin", thin), 1.1};
  }

  void emit(const std::string& name, const ResultTable& table) {
    write_results(table, out_dir() / name);
    outputs_.push_back(name);
  }
  json& diagnostics() { return diagnostics_; }

  void finish(std::uint64_t master_seed) {
    json config = json::object();
    for (const auto& [k, v] : cfg_.values()) config[k] = v;
    json m{{"command", command_},
           {"version", artifact_version()},
           {"config_hash", cfg_.hash()},
           {"master_seed", master_seed},
           {"threads", threads_},
           {"config", config},
           {"outputs", outputs_},
           {"diagnostics", diagnostics_.is_null() ? json::object() : diagnostics_},
           {"wall_clock_seconds",
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    write_manifest(m, out_dir() / "manifest.json");
  }

 private:
  std::string key_of(const std::string& key) const { return section_of(command_) + "." + key; }

  std::string command_;
  const Common& common_;
  ExperimentConfig cfg_;
  int threads_ = 1;
  std::vector<std::string> outputs_;
  json diagnostics_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

ResultTable field_table() {
  return ResultTable{{{"vertex", CT::Int}, {"col", CT::Int}, {"row", CT::Int}}, {}};
}

int cmd_sample(Run& run) {
  const std::uint64_t seed = run.seed();
  const int n = run.count("n", 16);
  const double T = run.real("T", 1.0);
  const Lattice L = Lattice::square(n, run.boundary(n));
  Rng rng = make_rng(seed, {0});
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, T);
  const IntegerField m = true_heights(a, phi);
  ResultTable t = field_table();
  t.columns.insert(t.columns.end(), {{"phi", CT::Real}, {"a", CT::Real}, {"m", CT::Int}, {"seed", CT::Text}});
  for (int v = 0; v < L.num_vertices(); ++v)
    t.add_row({I(v), I(L.site(v).col), I(L.site(v).row), R(phi[v]), R(a.a[v]), I(m[v]), S(hex(derive_seed(seed, {0})))});
  run.emit("sample.csv", t);
  run.diagnostics()["dirichlet_energy"] = dirichlet_energy(L, phi);
  run.finish(seed);
  return 0;
}

int cmd_reconstruct(Run& run) {
  const std::uint64_t seed = run.seed();
  const int n = run.count("n", 16);
  const double T = run.real("T", 0.5);
  const Lattice L = Lattice::square(n);
  Rng rng = make_rng(seed, {0});
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, T);
  ReconConfig rc;
  rc.chain = run.chain(500, 100, 5);
  rc.n_chains = run.count("chains", 4);
  const std::uint64_t chain_seed = derive_seed(seed, {1});
  const ReconResult r = reconstruct(a, rc, chain_seed);
  ResultTable t = field_table();
  t.columns.insert(t.columns.end(), {{"phi", CT::Real}, {"a", CT::Real}, {"mean", CT::Real}, {"variance", CT::Real},
                                     {"seed", CT::Text}});
  double sq = 0.0;
  for (int v = 0; v < L.num_vertices(); ++v) {
    t.add_row({I(v), I(L.site(v).col), I(L.site(v).row), R(phi[v]), R(a.a[v]), R(r.mean_field[v]),
               R(r.per_site_var[v]), S(hex(chain_seed))});
    sq += (r.mean_field[v] - phi[v]) * (r.mean_field[v] - phi[v]);
  }
  run.emit("reconstruct.csv", t);
  run.diagnostics() = {{"rhat", r.rhat}, {"converged", r.converged}, {"n_samples", r.n_samples},
                       {"mean_squared_error", sq / L.num_vertices()}};
  std::printf("reconstruction at T=%g, n=%d: mean squared error %.6g, R-hat %.4f%s\n", T, n, sq / L.num_vertices(),
              r.rhat, r.converged ? "" : " (not converged)");
  run.finish(seed);
  return 0;
}

DisorderConfig disorder_config(const Run& run, std::uint64_t seed, int n_disorder) {
  DisorderConfig c;
  c.n_disorder = run.count("n_disorder", n_disorder);
  c.pairs_per_disorder = run.count("pairs", 1);
  c.chain = run.chain(500, 50, 5);
  c.seed = seed;
  c.threads = run.threads();
  return c;
}

int cmd_sweep(Run& run) {
  const std::uint64_t seed = run.seed();
  const auto Ts = run.reals("T", {0.5, 1.0, 2.0, 4.0});
  const auto ns = run.counts("n", {8, 16});
  const DisorderConfig c = disorder_config(run, seed, run.quick() ? 8 : 32);
  const auto rows = transition_sweep(Ts, ns, c, run.boundary(0).kind == BoundaryKind::Free
                                                    ? BoundaryCondition::free({0, 0})
                                                    : BoundaryCondition::dirichlet());
  ResultTable t{{{"T", CT::Real}, {"n", CT::Int}, {"ratio", CT::Real}, {"std_error", CT::Real}, {"green", CT::Real},
                 {"rhat_max", CT::Real}, {"n_flagged", CT::Int}, {"seed", CT::Text}},
                {}};
  for (const auto& r : rows) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(std::llround(r.T * 1e6)),
                                               static_cast<std::uint64_t>(r.n)});
    t.add_row({R(r.T), I(r.n), R(r.ratio), R(r.std_error), R(r.green), R(r.rhat_max), I(r.n_flagged), S(hex(s))});
    std::printf("T=%-8g n=%-4d ratio=%.5f  se=%.5f  rhat_max=%.3f  flagged=%d\n", r.T, r.n, r.ratio, r.std_error,
                r.rhat_max, r.n_flagged);
  }
  run.emit("sweep.csv", t);
  run.finish(seed);
  return 0;
}

int cmd_peierls(Run& run) {
  const std::uint64_t seed = run.seed();
  const int n = run.count("n", 16);
  const double T = run.real("T", 0.5);
  const Lattice L = Lattice::square(n, run.boundary(n));
  const DisorderConfig c = disorder_config(run, seed, run.quick() ? 16 : 64);
  const TailResult r = cluster_tail(L, T, L.center(), c);
  ResultTable t{{{"L", CT::Int}, {"survival", CT::Real}, {"seed", CT::Text}}, {}};
  for (std::size_t i = 0; i < r.L.size(); ++i) t.add_row({I(r.L[i]), R(r.survival[i]), S(hex(seed))});
  run.emit("survival.csv", t);
  run.diagnostics() = {{"n_pairs", r.n_pairs},
                       {"n_observations", r.n_observations},
                       {"degenerate", r.degenerate},
                       {"rate", r.rate},
                       {"r2", r.fit.r2},
                       {"gradient_rule_edges", r.gradient_rule.edges_checked},
                       {"gradient_rule_violations", r.gradient_rule.violations}};
  std::printf("%d pairs; %s; gradient rule violations %ld of %ld edges\n", r.n_pairs,
              r.degenerate ? "survival curve degenerate" : fmt::format("decay rate {:.4f}, R2 {:.4f}", r.rate, r.fit.r2).c_str(),
              r.gradient_rule.violations, r.gradient_rule.edges_checked);
  run.finish(seed);
  return 0;
}

int cmd_theta_check(Run& run) {
  AcceptanceOptions opt;
  opt.seed = run.seed(opt.seed);
  opt.out_dir = run.out_dir();
  opt.threads = run.threads();
  ResultTable t{{{"check", CT::Text}, {"pass", CT::Int}, {"detail", CT::Text}}, {}};
  bool ok = true;
  for (int id : {1, 2, 5}) {
    const CriterionResult r = run_criterion(id, opt);
    std::printf("%s\n", format_result_line(r).c_str());
    t.add_row({S(r.title), I(r.pass), S(r.detail)});
    for (const auto& o : r.outputs) run.diagnostics()["tables"].push_back(o);
    ok = ok && r.pass;
  }
  run.emit("theta_check.csv", t);
  run.finish(opt.seed);
  return ok ? 0 : 1;
}

int cmd_sine_gordon(Run& run) {
  const std::uint64_t seed = run.seed();
  SgConfig c;
  c.beta = run.real("beta", 0.2);
  const std::string z = run.text("z", "4");
  if (z == "inf") c.z = std::numeric_limits<double>::infinity();
  else if (z == "0") c.z = 0.0;
  else c.z = run.real("z", 4.0);
  const std::string d = run.text("disorder", "uniform");
  if (d == "uniform") c.disorder = DisorderKind::Uniform;
  else if (d == "gffmod") c.disorder = DisorderKind::GffMod;
  else throw Error("disorder must be 'uniform' or 'gffmod', got '" + d + "'");
  c.T = run.real("T", 1.0);
  c.burn_in = run.count("burn_in", 500);
  c.samples = run.count("samples", 20);
  c.thin = run.count("thin", 10);
  const auto ns = run.counts("n", {8, 16});
  const int nd = run.count("n_disorder", run.quick() ? 20 : 100);
  const auto rows = variance_profile(c, ns, nd, seed, run.threads());
  ResultTable t{{{"n", CT::Int}, {"variance", CT::Real}, {"std_error", CT::Real}, {"gff_reference", CT::Real},
                 {"n_disorder", CT::Int}, {"acceptance", CT::Real}, {"seed", CT::Text}},
                {}};
  for (const auto& r : rows) {
    t.add_row({I(r.n), R(r.variance), R(r.std_error), R(r.gff_reference), I(r.n_disorder), R(r.acceptance),
               S(hex(seed))});
    std::printf("n=%-4d Var(phi0)=%.5f  se=%.5f  G/beta=%.5f  acceptance=%.3f\n", r.n, r.variance, r.std_error,
                r.gff_reference, r.acceptance);
  }
  run.emit("sine_gordon.csv", t);
  run.finish(seed);
  return 0;
}

int cmd_level_line(Run& run) {
  const std::uint64_t seed = run.seed();
  const int n = run.count("n", 16);
  const double T = run.real("T", 0.25);
  const Lattice L = Lattice::square(n);
  Rng rng = make_rng(seed, {0});
  const VertexField phi = GffSampler(L).sample(rng);
  const VertexField u = harmonic_boundary(L);
  VertexField s(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) s[v] = phi[v] + u[v];
  const PhaseField a = observe(L, phi, T);
  ReconConfig rc;
  rc.chain = run.chain(200, 50, 2);
  rc.n_chains = run.count("chains", 2);
  const DualPath truth = trace_level_line(s, L);
  const DualPath rec = reconstructed_level_line(a, rc, derive_seed(seed, {1}));
  std::vector<std::pair<std::string, DualPath>> paths{{"true", truth}, {"reconstructed", rec}};
  std::optional<double> phase_distance;
  if (T * kLevelLineLambda < std::numbers::pi) {
    paths.emplace_back("phase", trace_phase_level_line(a));
    phase_distance = hausdorff(truth, paths.back().second);
  }
  ResultTable t{{{"path", CT::Text}, {"index", CT::Int}, {"x", CT::Real}, {"y", CT::Real}, {"seed", CT::Text}}, {}};
  for (const auto& [name, p] : paths)
    for (std::size_t i = 0; i < p.points.size(); ++i)
      t.add_row({S(name), I(i), R(p.points[i].x), R(p.points[i].y), S(hex(seed))});
  run.emit("level_line.csv", t);
  const double h = hausdorff(truth, rec);
  run.diagnostics() = {{"hausdorff_reconstructed", h}};
  if (phase_distance) run.diagnostics()["hausdorff_phase"] = *phase_distance;
  std::printf("Hausdorff distance true vs reconstructed: %.6g\n", h);
  run.finish(seed);
  return 0;
}

int cmd_verify(Run& run) {
  AcceptanceOptions opt;
  opt.seed = run.seed(opt.seed);
  opt.threads = run.threads();
  opt.quick = run.quick();
  opt.out_dir = run.out_dir();
  ResultTable t{{{"criterion", CT::Int}, {"title", CT::Text}, {"pass", CT::Int}, {"seconds", CT::Real},
                 {"detail", CT::Text}},
                {}};
  int passed = 0;
  for (int id = 1; id <= kNumCriteria; ++id) {
    const CriterionResult r = run_criterion(id, opt);
    std::printf("%s\n", format_result_line(r).c_str());
    std::fflush(stdout);
    passed += r.pass;
    t.add_row({I(id), S(r.title), I(r.pass), R(r.seconds), S(r.detail)});
  }
  std::printf("%d of %d criteria passed\n", passed, kNumCriteria);
  run.emit("verify.csv", t);
  run.diagnostics() = {{"passed", passed}, {"criteria", kNumCriteria}, {"quick", opt.quick}};
  run.finish(opt.seed);
  return passed == kNumCriteria ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-observed lattice GFF: sampling, reconstruction and diagnostics"};
  app.require_subcommand(1);
  Common common;
  std::map<std::string, std::function<int(Run&)>> handlers{
      {"sample", cmd_sample},           {"reconstruct", cmd_reconstruct}, {"sweep", cmd_sweep},
      {"peierls", cmd_peierls},         {"theta-check", cmd_theta_check}, {"sine-gordon", cmd_sine_gordon},
      {"level-line", cmd_level_line},   {"verify", cmd_verify}};
  const std::map<std::string, std::string> help{
      {"sample", "draw a GFF and its phase observation"},
      {"reconstruct", "Monte Carlo conditional mean from a phase observation"},
      {"sweep", "conditional variance ratio over a (T, n) grid"},
      {"peierls", "survival curve of disagreement clusters"},
      {"theta-check", "theta function identities and sigma(T)"},
      {"sine-gordon", "annealed variance profile of the random-phase sine-Gordon model"},
      {"level-line", "true and reconstructed level lines"},
      {"verify", "run the acceptance suite"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, h] : help) {
    CLI::App* sub = app.add_subcommand(name, h);
    sub->add_option("--config", common.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "master seed (overrides run.seed)");
    sub->add_option("--threads", common.threads, "worker threads (overrides run.threads and GFFMOD_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quick", common.quick, "reduced budgets");
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);
  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    try {
      Run run(sub->get_name(), common);
      return handlers.at(sub->get_name())(run);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
