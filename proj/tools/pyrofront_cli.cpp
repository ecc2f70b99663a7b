// Command-line front end. Talks to the library only through pyrofront.h.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pyrofront/pyrofront.h"

namespace {

struct ConfigHandle {
  pf_config* p = nullptr;
  ~ConfigHandle() { pf_config_free(p); }
};

struct Text {
  char* p = nullptr;
  ~Text() { pf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

bool check(pf_status s, const std::string& what) {
  if (s == PF_OK) return true;
  std::cerr << "pyrofront: " << what << ": " << pf_last_error() << " (" << pf_status_name(s) << ")\n";
  return false;
}

struct RunOptions {
  std::string config;
  std::string mode;
  std::string scenario;
  std::vector<unsigned long long> seeds;
  int episodes = 0;
  std::string out;
  bool reduced = false;
  bool full = false;
  std::vector<std::string> sets;
};

void add_run_flags(CLI::App* app, RunOptions& o) {
  app->add_option("--config", o.config, "JSON config file");
  app->add_option("--mode", o.mode, "observation | belief")->check(CLI::IsMember({"observation", "belief"}));
  app->add_option("--scenario", o.scenario, "static | dynamic")
      ->check(CLI::IsMember({"static", "static_batch", "dynamic"}));
  app->add_option("--seed,--seeds", o.seeds, "seed(s); several seeds run concurrently")->delimiter(',');
  app->add_option("--episodes", o.episodes, "number of episodes (scan + tracking)");
  app->add_option("--out", o.out, "output root (default: $PYROFRONT_OUT or the config's output_dir)");
  app->add_flag("--reduced-net", o.reduced, "use the reduced network");
  app->add_flag("--full-net", o.full, "use the full-size network");
  app->add_option("--set", o.sets, "override, key=value (repeatable)");
}

bool build_config(const RunOptions& o, ConfigHandle& cfg) {
  if (!o.config.empty()) {
    if (!check(pf_config_load(o.config.c_str(), &cfg.p), "loading " + o.config)) return false;
  } else if (!check(pf_config_create(&cfg.p), "creating config")) {
    return false;
  }
  std::vector<std::string> sets;
  if (!o.mode.empty()) sets.push_back("mode=" + o.mode);
  if (!o.scenario.empty()) sets.push_back("scenario=" + o.scenario);
  if (o.episodes > 0) sets.push_back("episodes=" + std::to_string(o.episodes));
  if (o.reduced) sets.push_back("train.reduced_net=true");
  if (o.full) sets.push_back("train.reduced_net=false");
  sets.insert(sets.end(), o.sets.begin(), o.sets.end());
  for (const auto& s : sets)
    if (!check(pf_config_set(cfg.p, s.c_str()), "override '" + s + "'")) return false;
  return check(pf_config_validate(cfg.p), "config");
}

std::filesystem::path output_root(const RunOptions& o, const pf_config* cfg) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("PYROFRONT_OUT"); env != nullptr && *env != '\0') return env;
  Text dir;
  pf_config_output_dir(cfg, &dir.p);
  return dir.str();
}

int run_command(const RunOptions& o, bool scan_only) {
  ConfigHandle base;
  if (!build_config(o, base)) return 2;
  const std::filesystem::path root = output_root(o, base.p);

  std::vector<unsigned long long> seeds = o.seeds;
  std::vector<pf_config*> cfgs;
  if (seeds.empty()) {
    pf_config* c = nullptr;
    pf_config_clone(base.p, &c);
    cfgs.push_back(c);
  }
  for (auto s : seeds) {
    pf_config* c = nullptr;
    pf_config_clone(base.p, &c);
    pf_config_set(c, ("seed=" + std::to_string(s)).c_str());
    cfgs.push_back(c);
  }

  std::mutex io_mutex;
  std::vector<int> ok(cfgs.size(), 0);
  auto work = [&](std::size_t i) {
    Text id;
    pf_config_run_id(cfgs[i], &id.p);
    const std::filesystem::path dir = root / id.str();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    pf_run* run = nullptr;
    const pf_status s = scan_only ? pf_scan_demo(cfgs[i], dir.c_str(), &run) : pf_run_experiment(cfgs[i], dir.c_str(), &run);
    std::lock_guard<std::mutex> lock(io_mutex);
    if (!check(s, "run " + dir.string())) return;
    ok[i] = pf_run_complete(run);
    std::cout << dir.string() << ": " << pf_run_episode_count(run) << " episode(s)";
    if (scan_only) {
      double frac = 0.0;
      pf_run_observed_fraction(run, 1, &frac);
      std::cout << ", observed fraction " << frac;
    }
    std::cout << "\n";
    pf_run_free(run);
  };

  if (cfgs.size() == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < cfgs.size(); ++i) threads.emplace_back(work, i);
    for (auto& t : threads) t.join();
  }
  for (auto* c : cfgs) pf_config_free(c);
  for (int v : ok)
    if (!v) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pyrofront: UAV wildfire scan-and-track experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pf_version());

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "full experiment: scan episode followed by tracking episodes");
  add_run_flags(run, run_opts);

  RunOptions scan_opts;
  auto* scan = app.add_subcommand("scan-demo", "scan phase only");
  add_run_flags(scan, scan_opts);

  int gc_samples = 320;
  int gc_grid = 16;
  unsigned long long gc_seed = 1;
  bool gc_full = false;
  auto* gc = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
  gc->add_option("--samples", gc_samples, "parameters to check");
  gc->add_option("--grid", gc_grid, "grid size of the input map");
  gc->add_option("--seed", gc_seed, "seed");
  gc->add_flag("--full-net", gc_full, "check the full-size network");

  std::string metrics_dir;
  auto* metrics = app.add_subcommand("metrics", "recompute summary.json from the episode logs");
  metrics->add_option("run_dir", metrics_dir, "run directory")->required();

  std::string export_dir;
  auto* exp = app.add_subcommand("export", "write trajectory overlays and the file manifest");
  exp->add_option("run_dir", export_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) return run_command(run_opts, false);
  if (*scan) return run_command(scan_opts, true);
  if (*gc) {
    double err = 0.0;
    size_t checked = 0;
    if (!check(pf_gradient_check(gc_full ? 0 : 1, gc_grid, gc_seed, gc_samples, &err, &checked), "gradcheck"))
      return 2;
    std::printf("checked %zu parameters, max relative error %.3e\n", checked, err);
    return err < 1e-4 ? 0 : 1;
  }
  if (*metrics) {
    Text s;
    if (!check(pf_recompute_metrics(metrics_dir.c_str(), &s.p), "metrics")) return 2;
    std::cout << s.str();
    return 0;
  }
  if (*exp) {
    Text s;
    if (!check(pf_export_artifacts(export_dir.c_str(), &s.p), "export")) return 2;
    std::cout << s.str();
    return 0;
  }
  return 0;
}
