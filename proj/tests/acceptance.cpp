// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "helpers.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "pyrofront/belief.hpp"
#include "pyrofront/io.hpp"
#include "pyrofront/metrics.hpp"
#include "pyrofront/mission.hpp"
#include "pyrofront/qlearn.hpp"

using namespace pyrofront;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Environment invariants over 100 seeded episodes.
Outcome environment_invariants() {
  constexpr double kWeightTol = 1e-12;
  const std::regex pattern("0*1*2*");
  double worst_weight = 0.0;
  long weight_checks = 0;
  bool states_ok = true, fuel_ok = true, certainty_ok = true;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ExperimentConfig cfg;
    cfg.mode = RunMode::kObservation;
    EnvState env = init_environment(cfg.env, derive_seed(seed, 1));
    Rng progression(derive_seed(seed, 4));
    std::vector<std::string> history(static_cast<std::size_t>(env.n * env.n));
    Grid<double> fuel = env.fuel;
    auto record = [&](const EnvState& e) {
      for (int i = 0; i < e.n * e.n; ++i) {
        history[i] += static_cast<char>('0' + static_cast<int>(e.ignition.data()[i]));
        if (e.fuel.data()[i] > fuel.data()[i]) fuel_ok = false;
      }
      fuel = e.fuel;
      for (int y = 0; y < e.n; ++y)
        for (int x = 0; x < e.n; ++x) {
          if (e.ignition(x, y) != Ignition::kUnburnt) continue;
          const auto w = source_weights(e, cfg.env, {x, y});
          if (w.empty()) continue;
          double sum = 0.0;
          for (const auto& sw : w) sum += sw.weight;
          worst_weight = std::max(worst_weight, std::abs(sum - 1.0));
          ++weight_checks;
        }
    };
    EpisodeOptions opts;
    opts.index = static_cast<int>(seed);
    opts.obs_seed = derive_seed(seed, 5);
    Rng walk(derive_seed(seed, 6));
    opts.scripted = [&](const PolicyContext& ctx) {
      const auto v = ctx.valid.to_vector();
      return v[uniform_int(walk, 0, static_cast<int>(v.size()) - 1)];
    };
    opts.on_step = [&](int, bool, const EnvState& e, const AgentView& view) {
      record(e);
      for (double c : view.certainty_map().values().data())
        if (!(c >= 0.0 && c <= 1.0)) certainty_ok = false;
    };
    cfg.agent.battery_init = 100.0;
    cfg.agent.hover_cost = 0.0;  // keep the walk alive the whole episode
    cfg.agent.move_cost = 0.0;
    cfg.reward.burnout_limit = 1 << 30;
    (void)run_episode(env, progression, cfg, nullptr, opts);
    for (const auto& h : history)
      if (!std::regex_match(h, pattern)) states_ok = false;
  }
  Outcome o;
  o.pass = worst_weight <= kWeightTol && states_ok && fuel_ok && certainty_ok;
  o.detail = "max |sum w - 1| = " + fmt("%.2e", worst_weight) + " over " + std::to_string(weight_checks) +
             " targets; states 0*1*2* " + (states_ok ? "ok" : "VIOLATED") + "; fuel monotone " +
             (fuel_ok ? "ok" : "VIOLATED") + "; certainty in [0,1] " + (certainty_ok ? "ok" : "VIOLATED");
  return o;
}

EnvState chain_env(int vegetated, double mag, double phase) {
  EnvState s = pftest::blank_env(2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      if (y == 0 && x < vegetated) continue;
      s.veg_type(x, y) = 0;
      s.density(x, y) = 0.0;
      s.fuel(x, y) = 0.0;
      s.initial_fuel(x, y) = 0.0;
    }
  s.ignition(0, 0) = Ignition::kBurning;
  for (auto* g : {&s.wind_mag, &s.base_wind_mag}) *g = Grid<double>(2, mag);
  for (auto* g : {&s.wind_phase, &s.base_wind_phase}) *g = Grid<double>(2, phase);
  return s;
}

// 2. Oracle update against enumerated Markov chains.
Outcome belief_oracle() {
  constexpr double kTol = 1e-12;
  constexpr int kSteps = 50;
  EnvConfig ecfg;
  ecfg.grid_size = 2;
  BeliefConfig bcfg;
  bcfg.test_mode = true;
  double worst = 0.0;
  int chains = 0;
  for (int cells = 1; cells <= 2; ++cells) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      EnvState env = chain_env(cells, 100.0 * uniform01(rng), 6.28 * uniform01(rng));
      auto map = init_belief(env.density, env.veg_type, 1.0, 1.0);
      std::vector<double> b0;
      for (int i = 0; i < cells; ++i) {
        b0.push_back(uniform01(rng));
        map.set_mean({i, 0}, b0.back());
      }
      std::vector<std::vector<double>> p01, p12, got;
      for (int k = 0; k < kSteps; ++k) {
        std::vector<double> a(cells, 0.0), b(cells, 0.0);
        for (int i = 0; i < cells; ++i) {
          const Cell c{i, 0};
          if (env.ignition[c] == Ignition::kUnburnt) a[i] = ignition_probability(env, ecfg, c);
          if (env.ignition[c] == Ignition::kBurning) b[i] = burns_out(ecfg, decayed_fuel(env, ecfg.wind_max, c));
        }
        p01.push_back(a);
        p12.push_back(b);
        oracle_bayes_update(map, env, ecfg, bcfg);
        std::vector<double> row;
        for (int i = 0; i < cells; ++i) row.push_back(map.b(i, 0));
        got.push_back(row);
        env_step(env, ecfg, rng);
      }
      const auto expected = pftest::joint_chain(b0, p01, p12);
      for (int k = 0; k < kSteps; ++k)
        for (int i = 0; i < cells; ++i) worst = std::max(worst, std::abs(got[k][i] - expected[k][i]));
      if (cells == 1) {
        // Path enumeration over the first 16 steps as a second oracle.
        std::vector<double> a, b;
        for (int k = 0; k < 16; ++k) {
          a.push_back(p01[k][0]);
          b.push_back(p12[k][0]);
        }
        worst = std::max(worst, std::abs(got[15][0] - pftest::enumerate_chain(b0[0], a, b)));
      }
      ++chains;
    }
  }
  return {worst <= kTol, std::to_string(chains) + " chains x " + std::to_string(kSteps) +
                             " steps, max deviation " + fmt("%.2e", worst) + " (tol 1e-12)"};
}

// 3. Gradient check on the reduced network.
Outcome gradient_verification() {
  nn::ValueNet net(nn::NetConfig::reduced(16), 11);
  Rng rng(31);
  const auto r = gradient_check(net, rng, 320);
  return {r.checked >= 200 && r.max_relative_error < 1e-4,
          std::to_string(r.checked) + " parameters, max relative error " + fmt("%.2e", r.max_relative_error) +
              " (tol 1e-4)"};
}

// 4. MIA bound on every logged step plus hand examples.
Outcome mia_checks(const std::vector<fs::path>& runs) {
  const double bound = std::pow(5.0, 3) / std::sqrt(2.0);
  const BatchView one{4, 2.0};
  const BatchView full{25, 0.0};
  const double ex1 = mia(5, std::span(&one, 1));
  const double ex2 = mia(5, std::span(&full, 1));
  bool ok = std::abs(ex1 - 5.0 / std::sqrt(2.0) * 4.0 / 2.0) < 1e-9 && std::abs(ex1 - 7.0710678118654755) < 1e-9 &&
            std::abs(ex2 - bound) < 1e-9 && std::abs(bound - 88.38834764831844) < 1e-9;
  long steps = 0;
  double worst = 0.0;
  for (const auto& run : runs) {
    for (const auto& entry : fs::directory_iterator(run / "episodes")) {
      if (entry.path().extension() != ".csv") continue;
      for (const auto& s : io::read_episode_csv(entry.path())) {
        worst = std::max(worst, s.mia);
        ++steps;
      }
    }
  }
  ok = ok && steps > 0 && worst <= bound + 1e-9;
  return {ok, "examples 7.0711 / 88.3883 ok; " + std::to_string(steps) + " logged steps, max MIA " +
                  fmt("%.4f", worst) + " <= " + fmt("%.4f", bound)};
}

// 5. Scan coverage.
Outcome scan_coverage(const fs::path& out) {
  bool ok = true;
  std::string detail;
  for (int n : {8, 16, 32}) {
    for (int fov : {3, 5}) {
      for (Cell start : {Cell{0, 0}, Cell{n - 1, n - 1}, Cell{n - 1, 0}}) {
        const auto path = scan_path(n, fov, start);
        ScanPilot pilot(path);
        Grid<std::uint8_t> seen(n, 0);
        Cell pos = start;
        for (int guard = 0; guard < 100000; ++guard) {
          for (Cell f : fov_cells(pos, fov, n)) seen[f] = 1;
          const auto a = pilot.next(pos);
          if (!a) break;
          const Cell d = action_delta(*a);
          pos = {pos.x + d.x, pos.y + d.y};
        }
        for (auto v : seen.data()) ok = ok && v == 1;
      }
    }
  }
  detail = std::string("sweep union covers all of {8,16,32}x{3,5}: ") + (ok ? "yes" : "NO");
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kStaticBatch;
  cfg.agent.classification_error = pftest::identity_error();
  const auto res = run_experiment(cfg, out / "scan_static", true);
  const double frac = res.episodes.at(0).observed_fraction;
  ok = ok && frac == 1.0 && res.episodes[0].cause == TerminationCause::kScanComplete;
  detail += "; static scan observed fraction " + fmt("%.4f", frac) + " in " +
            std::to_string(res.episodes[0].steps.size()) + " steps";
  return {ok, detail};
}

struct ArmResult {
  double coverage = 0.0;
  double mia = 0.0;
};

ArmResult run_arm(const fs::path& out, RunMode mode, Scenario sc, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.scenario = sc;
  cfg.seed = seed;
  const fs::path dir = out / "ordinal" / (to_string(mode) + "_" + to_string(sc) + "_seed" + std::to_string(seed));
  fs::remove_all(dir);
  (void)run_experiment(cfg, dir);
  const auto summary = json::parse(io::read_text(dir / "summary.json"));
  return {summary["coverage_ratio"].get<double>(), summary["time_average_mia"].get<double>()};
}

// 6. Ordinal comparison between representations.
Outcome ordinal(const fs::path& out, int seeds) {
  std::vector<ArmResult> bd, od, bs, os;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    bd.push_back(run_arm(out, RunMode::kBelief, Scenario::kDynamic, seed));
    od.push_back(run_arm(out, RunMode::kObservation, Scenario::kDynamic, seed));
    bs.push_back(run_arm(out, RunMode::kBelief, Scenario::kStaticBatch, seed));
    os.push_back(run_arm(out, RunMode::kObservation, Scenario::kStaticBatch, seed));
    std::fprintf(stderr, "  seed %d: dyn MIA belief %.3f obs %.3f | static cov belief %.3f obs %.3f\n", s, bd.back().mia,
                 od.back().mia, bs.back().coverage, os.back().coverage);
  }
  double mia_b = 0, mia_o = 0, cov_b = 0, cov_o = 0;
  int mia_agree = 0, cov_agree = 0;
  for (int i = 0; i < seeds; ++i) {
    mia_b += bd[i].mia / seeds;
    mia_o += od[i].mia / seeds;
    cov_b += bs[i].coverage / seeds;
    cov_o += os[i].coverage / seeds;
    mia_agree += bd[i].mia > od[i].mia;
    cov_agree += os[i].coverage >= bs[i].coverage;
  }
  const int need = static_cast<int>(std::ceil(0.7 * seeds));
  const bool ok = mia_b > mia_o && cov_o >= cov_b && mia_agree >= need && cov_agree >= need;
  std::ostringstream d;
  d << "dynamic MIA belief " << fmt("%.3f", mia_b) << " vs observation " << fmt("%.3f", mia_o) << " (" << mia_agree
    << "/" << seeds << " pairs); static coverage observation " << fmt("%.3f", cov_o) << " vs belief "
    << fmt("%.3f", cov_b) << " (" << cov_agree << "/" << seeds << " pairs); need " << need << "/" << seeds;
  return {ok, d.str()};
}

// 7. Determinism of summary.json.
Outcome determinism(const fs::path& out, std::vector<fs::path>& runs) {
  ExperimentConfig cfg;
  cfg.seed = 42;
  const fs::path a = out / "determinism_a", b = out / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  (void)run_experiment(cfg, a);
  (void)run_experiment(cfg, b);
  runs = {a, b};
  const std::string sa = io::read_text(a / "summary.json"), sb = io::read_text(b / "summary.json");
  const bool ok = sa == sb && !sa.empty();
  return {ok, std::string("summary.json ") + (ok ? "identical" : "DIFFERS") + " (" + std::to_string(sa.size()) +
                  " bytes, fnv " + std::to_string(fnv1a(sa.data(), sa.size())) + ")"};
}

// 8. Burnout-limit termination under a parked scripted policy.
Outcome burnout_limit() {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::kStaticBatch;
  EnvState env = init_environment(cfg.env, derive_seed(cfg.seed, 1));
  Rng progression(derive_seed(cfg.seed, 4, 2));
  prepare_scenario(env, cfg.env, cfg.scenario, progression);
  Cell fire{-1, -1};
  for (int y = 0; y < env.n && fire.x < 0; ++y)
    for (int x = 0; x < env.n && fire.x < 0; ++x)
      if (env.ignition(x, y) == Ignition::kBurning) fire = {x, y};
  if (fire.x < 0) return {false, "no burning cell after warm-up"};
  cfg.agent.start_x = fire.x;
  cfg.agent.start_y = fire.y;
  EpisodeOptions opts;
  opts.index = 2;
  opts.scripted = [](const PolicyContext&) { return Action::kHover; };
  const auto res = run_episode(env, progression, cfg, nullptr, opts);
  double penalty = 0.0;
  for (const auto& s : res.steps) penalty += s.burn_penalty;
  const bool ok = res.cause == TerminationCause::kBurnoutLimit && res.steps.size() == 10 &&
                  res.steps.back().burnout_steps == 10 && std::abs(penalty + 2000.0) < 1e-9;
  return {ok, "cause " + to_string(res.cause) + " after " + std::to_string(res.steps.size()) +
                  " steps, burnout penalty total " + fmt("%.1f", penalty)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pyrofront acceptance suite"};
  std::string out = "acceptance_runs";
  int seeds = 10;
  std::vector<int> only;
  app.add_option("--out", out, "directory for run artifacts");
  app.add_option("--seeds", seeds, "seeds per arm for the ordinal comparison")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const fs::path root(out);
  fs::create_directories(root);

  std::vector<fs::path> det_runs;
  std::optional<Outcome> det;
  auto ensure_determinism = [&] {
    if (!det) det = determinism(root, det_runs);
    return *det;
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"environment invariants", environment_invariants},
      {"belief oracle equivalence", belief_oracle},
      {"gradient verification", gradient_verification},
      {"MIA bound and examples",
       [&] {
         ensure_determinism();
         return mia_checks(det_runs);
       }},
      {"scan coverage", [&] { return scan_coverage(root); }},
      {"ordinal representation comparison", [&] { return ordinal(root, seeds); }},
      {"determinism", ensure_determinism},
      {"burnout-limit termination", burnout_limit},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
