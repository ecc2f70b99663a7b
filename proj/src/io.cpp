#include "pyrofront/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "pyrofront/error.hpp"
#include "pyrofront/rng.hpp"

namespace pyrofront::io {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'P', 'F', 'C', 'K'};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorCode::kIo, "bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorCode::kIo, "bad integer '" + s + "'");
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Grid<double> as_double(const Grid<Ignition>& g) {
  Grid<double> out(g.size());
  for (int y = 0; y < g.size(); ++y)
    for (int x = 0; x < g.size(); ++x) out(x, y) = static_cast<double>(g(x, y));
  return out;
}

Grid<double> from_vector(const std::vector<double>& v, int n) {
  Grid<double> out(n);
  std::copy(v.begin(), v.end(), out.data().begin());
  return out;
}

std::string episode_stem(int k) { return "ep_" + std::to_string(k); }

Action parse_action(const std::string& s) {
  for (int i = 0; i < kNumActions; ++i)
    if (to_string(action_from_index(i)) == s) return action_from_index(i);
  fail(ErrorCode::kIo, "unknown action '" + s + "'");
}

struct EpisodeStats {
  int steps = 0;
  double coverage = 1.0;
  int detected = 0;
  int ever_ignited = 0;
  double tam = 0.0;
  double total_reward = 0.0;
  double burn_penalty = 0.0;
  int burnout_steps = 0;
  double final_battery = 0.0;
};

EpisodeStats stats_of(const std::vector<StepLog>& steps) {
  EpisodeStats s;
  s.steps = static_cast<int>(steps.size());
  std::vector<double> mias;
  for (const auto& r : steps) {
    mias.push_back(r.mia);
    s.total_reward += r.total;
    s.burn_penalty += r.burn_penalty;
  }
  s.tam = time_average(mias);
  if (!steps.empty()) {
    s.detected = steps.back().detected;
    s.ever_ignited = steps.back().ever_ignited;
    s.coverage = coverage_ratio(s.detected, s.ever_ignited);
    s.burnout_steps = steps.back().burnout_steps;
    s.final_battery = steps.back().uav.battery;
  }
  return s;
}

double mean(const std::vector<double>& v) { return v.empty() ? 0.0 : time_average(v); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCode::kIo, "format_double failed");
  return {buf, ptr};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_grid_csv(const fs::path& path, const Grid<double>& grid) {
  std::string out;
  const int n = grid.size();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x > 0) out += ',';
      out += format_double(grid(x, y));
    }
    out += '\n';
  }
  write_text(path, out);
}

Grid<double> read_grid_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line, ',')) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  Grid<double> g(n);
  for (int y = 0; y < n; ++y) {
    if (static_cast<int>(rows[y].size()) != n) fail(ErrorCode::kIo, "grid csv is not square: " + path.string());
    for (int x = 0; x < n; ++x) g(x, y) = rows[y][x];
  }
  return g;
}

void write_grid_pgm(const fs::path& path, const Grid<double>& grid, double lo, double hi) {
  const int n = grid.size();
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  // Row 0 of the image is the northern edge.
  for (int y = n - 1; y >= 0; --y) {
    for (int x = 0; x < n; ++x) {
      const double v = std::clamp((grid(x, y) - lo) / span, 0.0, 1.0);
      out += static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
  }
  write_text(path, out);
}

void write_snapshot(const fs::path& dir, const EnvState& env, const AgentView& view, double wind_max) {
  const std::string prefix = "step_" + std::to_string(env.t) + "_";
  auto put = [&](const std::string& name, const Grid<double>& g, double lo, double hi) {
    write_grid_csv(dir / (prefix + name + ".csv"), g);
    write_grid_pgm(dir / (prefix + name + ".pgm"), g, lo, hi);
  };
  double max_fuel = 0.0;
  for (double f : env.initial_fuel.data()) max_fuel = std::max(max_fuel, f);
  put("F", as_double(env.ignition), 0.0, 2.0);
  put("f", env.fuel, 0.0, max_fuel);
  put("A", env.wind_mag, 0.0, wind_max);
  put("phi", env.wind_phase, 0.0, 2.0 * std::numbers::pi);
  if (view.mode() == RunMode::kBelief) {
    put("b", view.belief().b, 0.0, 1.0);
  } else {
    put("c", view.certainty_map().values(), 0.0, 1.0);
  }
  put("z", from_vector(view.input(env.t), env.n), 0.0, 1.0);
}

void save_checkpoint(const fs::path& path, const nn::ValueNet& net, std::uint64_t config_hash) {
  const auto& cfg = net.config();
  const auto values = net.store().values();
  std::string blob(kMagic, sizeof kMagic);
  auto put = [&blob](const auto& v) { blob.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(kCheckpointVersion);
  for (std::int32_t v : {cfg.grid, cfg.conv1, cfg.conv2, cfg.state_hidden, cfg.head_hidden}) put(v);
  put(config_hash);
  put(static_cast<std::uint64_t>(values.size()));
  blob.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
  write_text(path, blob);

  json m;
  m["version"] = kCheckpointVersion;
  m["config_hash"] = hex64(config_hash);
  m["num_params"] = values.size();
  m["net"] = {{"grid", cfg.grid},
              {"conv1", cfg.conv1},
              {"conv2", cfg.conv2},
              {"state_hidden", cfg.state_hidden},
              {"head_hidden", cfg.head_hidden}};
  m["layers"] = json::array();
  for (const auto& b : net.param_blocks())
    m["layers"].push_back({{"name", b.name}, {"offset", b.offset}, {"count", b.count}});
  m["architecture"] = net.describe();
  m["payload_hash"] = hex64(fnv1a(blob.data(), blob.size()));
  write_text(path.string() + ".json", m.dump(2) + "\n");
}

nn::ValueNet load_checkpoint(const fs::path& path, CheckpointInfo* info) {
  const std::string blob = read_text(path);
  std::size_t pos = 0;
  auto get = [&](auto& v) {
    if (pos + sizeof v > blob.size()) fail(ErrorCode::kIo, "truncated checkpoint '" + path.string() + "'");
    std::memcpy(&v, blob.data() + pos, sizeof v);
    pos += sizeof v;
  };
  if (blob.size() < sizeof kMagic || std::memcmp(blob.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorCode::kIo, "not a checkpoint: '" + path.string() + "'");
  pos = sizeof kMagic;
  CheckpointInfo ci;
  get(ci.version);
  if (ci.version != kCheckpointVersion)
    fail(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(ci.version));
  std::int32_t dims[5];
  for (auto& d : dims) get(d);
  ci.net = nn::NetConfig{dims[0], dims[1], dims[2], dims[3], dims[4]};
  get(ci.config_hash);
  std::uint64_t count = 0;
  get(count);
  ci.num_params = count;
  nn::ValueNet net(ci.net, 0);
  if (net.num_params() != count) fail(ErrorCode::kIo, "checkpoint parameter count does not match its shape");
  if (blob.size() - pos != count * sizeof(double)) fail(ErrorCode::kIo, "checkpoint payload size mismatch");
  std::memcpy(net.store().values().data(), blob.data() + pos, count * sizeof(double));
  if (info != nullptr) *info = ci;
  return net;
}

static const char* kEpisodeHeader =
    "step,t,x,y,heading,battery,action,objective,constraint,info,total,mia,detected,ever_ignited,burnout_steps,"
    "burn_penalty,loss";

void write_episode_csv(const fs::path& path, const std::vector<StepLog>& steps, int) {
  std::string out = std::string(kEpisodeHeader) + "\n";
  for (const auto& s : steps) {
    out += std::to_string(s.step) + "," + std::to_string(s.t) + "," + std::to_string(s.uav.pos.x) + "," +
           std::to_string(s.uav.pos.y) + "," + std::to_string(s.uav.heading.value_or(-1)) + "," +
           format_double(s.uav.battery) + "," + to_string(s.action) + "," + format_double(s.reward.objective) + "," +
           format_double(s.reward.constraint) + "," + format_double(s.reward.info) + "," + format_double(s.total) +
           "," + format_double(s.mia) + "," + std::to_string(s.detected) + "," + std::to_string(s.ever_ignited) +
           "," + std::to_string(s.burnout_steps) + "," + format_double(s.burn_penalty) + "," +
           format_double(s.loss) + "\n";
  }
  write_text(path, out);
}

std::vector<StepLog> read_episode_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  if (!std::getline(is, line) || line != kEpisodeHeader)
    fail(ErrorCode::kIo, "unexpected episode log header in '" + path.string() + "'");
  std::vector<StepLog> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 17) fail(ErrorCode::kIo, "bad episode row in '" + path.string() + "'");
    StepLog s;
    s.step = parse_int(f[0]);
    s.t = parse_int(f[1]);
    s.uav.pos = {parse_int(f[2]), parse_int(f[3])};
    const int h = parse_int(f[4]);
    if (h >= 0) s.uav.heading = h;
    s.uav.battery = parse_double(f[5]);
    s.action = parse_action(f[6]);
    s.uav.last_action_was_hover = s.action == Action::kHover;
    s.reward.objective = parse_double(f[7]);
    s.reward.constraint = parse_double(f[8]);
    s.reward.info = parse_double(f[9]);
    s.total = parse_double(f[10]);
    s.mia = parse_double(f[11]);
    s.detected = parse_int(f[12]);
    s.ever_ignited = parse_int(f[13]);
    s.burnout_steps = parse_int(f[14]);
    s.burn_penalty = parse_double(f[15]);
    s.loss = parse_double(f[16]);
    out.push_back(s);
  }
  return out;
}

void write_episode_json(const fs::path& path, const EpisodeMeta& meta) {
  json j{{"episode", meta.index},
         {"phase", to_string(meta.phase)},
         {"epsilon", meta.epsilon},
         {"termination", to_string(meta.cause)},
         {"final_t", meta.final_t},
         {"observed_fraction", meta.observed_fraction}};
  write_text(path, j.dump(2) + "\n");
}

EpisodeMeta read_episode_json(const fs::path& path) {
  try {
    const json j = json::parse(read_text(path));
    EpisodeMeta m;
    m.index = j.at("episode").get<int>();
    m.phase = j.at("phase").get<std::string>() == "scan" ? MissionPhase::kScan : MissionPhase::kTrack;
    m.epsilon = j.at("epsilon").get<double>();
    m.cause = parse_termination(j.at("termination").get<std::string>());
    m.final_t = j.at("final_t").get<int>();
    m.observed_fraction = j.at("observed_fraction").get<double>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "bad episode metadata '" + path.string() + "': " + e.what());
  }
}

EpisodeMeta meta_of(const EpisodeResult& r) {
  return {r.index, r.phase, r.epsilon, r.cause, r.final_t, r.observed_fraction};
}

namespace {

json summary_object(const ExperimentConfig& cfg, const std::vector<EpisodeMeta>& metas,
                    const std::vector<std::vector<StepLog>>& logs, bool complete) {
  json episodes = json::array();
  std::map<std::string, int> causes;
  for (int c = 0; c < 4; ++c) causes[to_string(static_cast<TerminationCause>(c))] = 0;
  std::vector<double> cov_track, mia_track, cov_all, mia_all;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    const auto& m = metas[i];
    const EpisodeStats s = stats_of(logs[i]);
    ++causes[to_string(m.cause)];
    cov_all.push_back(s.coverage);
    mia_all.push_back(s.tam);
    if (m.phase == MissionPhase::kTrack) {
      cov_track.push_back(s.coverage);
      mia_track.push_back(s.tam);
    }
    episodes.push_back({{"episode", m.index},
                        {"phase", to_string(m.phase)},
                        {"steps", s.steps},
                        {"final_t", m.final_t},
                        {"termination", to_string(m.cause)},
                        {"coverage_ratio", s.coverage},
                        {"detected", s.detected},
                        {"ever_ignited", s.ever_ignited},
                        {"time_average_mia", s.tam},
                        {"total_reward", s.total_reward},
                        {"burnout_steps", s.burnout_steps},
                        {"burnout_penalty", s.burn_penalty},
                        {"final_battery", s.final_battery},
                        {"epsilon", m.epsilon},
                        {"observed_fraction", m.observed_fraction}});
  }
  const bool has_track = !cov_track.empty();
  json j;
  j["complete"] = complete;
  j["mode"] = to_string(cfg.mode);
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["num_episodes"] = cfg.num_episodes;
  j["episodes_logged"] = metas.size();
  j["coverage_ratio"] = mean(has_track ? cov_track : cov_all);
  j["time_average_mia"] = mean(has_track ? mia_track : mia_all);
  j["coverage_ratio_all_episodes"] = mean(cov_all);
  j["time_average_mia_all_episodes"] = mean(mia_all);
  j["termination_causes"] = causes;
  j["episodes"] = episodes;
  return j;
}

}  // namespace

std::string summary_json(const ExperimentConfig& cfg, const std::vector<EpisodeMeta>& metas,
                         const std::vector<std::vector<StepLog>>& logs, bool complete) {
  return summary_object(cfg, metas, logs, complete).dump(2) + "\n";
}

std::string summary_csv(const std::vector<EpisodeMeta>& metas, const std::vector<std::vector<StepLog>>& logs) {
  std::string out =
      "episode,phase,steps,termination,coverage_ratio,detected,ever_ignited,time_average_mia,total_reward,"
      "burnout_steps,final_battery,epsilon\n";
  for (std::size_t i = 0; i < metas.size(); ++i) {
    const auto& m = metas[i];
    const EpisodeStats s = stats_of(logs[i]);
    out += std::to_string(m.index) + "," + to_string(m.phase) + "," + std::to_string(s.steps) + "," +
           to_string(m.cause) + "," + format_double(s.coverage) + "," + std::to_string(s.detected) + "," +
           std::to_string(s.ever_ignited) + "," + format_double(s.tam) + "," + format_double(s.total_reward) + "," +
           std::to_string(s.burnout_steps) + "," + format_double(s.final_battery) + "," + format_double(m.epsilon) +
           "\n";
  }
  return out;
}

void write_summary(const fs::path& run_dir, const ExperimentConfig& cfg, const std::vector<EpisodeMeta>& metas,
                   const std::vector<std::vector<StepLog>>& logs, bool complete) {
  write_text(run_dir / "summary.json", summary_json(cfg, metas, logs, complete));
  write_text(run_dir / "summary.csv", summary_csv(metas, logs));
}

namespace {

struct LoadedRun {
  ExperimentConfig cfg;
  std::vector<EpisodeMeta> metas;
  std::vector<std::vector<StepLog>> logs;
  bool complete = false;
};

LoadedRun load_run(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) fail(ErrorCode::kIo, "run directory '" + run_dir.string() + "' does not exist");
  LoadedRun r;
  r.cfg = config_from_json(read_text(run_dir / "config.json"));
  for (int k = 1;; ++k) {
    const fs::path stem = run_dir / "episodes" / episode_stem(k);
    if (!fs::exists(stem.string() + ".json") || !fs::exists(stem.string() + ".csv")) break;
    r.metas.push_back(read_episode_json(stem.string() + ".json"));
    r.logs.push_back(read_episode_csv(stem.string() + ".csv"));
  }
  r.complete = static_cast<int>(r.metas.size()) == r.cfg.num_episodes &&
               fs::exists(run_dir / "checkpoints" / "final.ckpt");
  return r;
}

}  // namespace

std::string recompute_summary(const fs::path& run_dir) {
  const LoadedRun r = load_run(run_dir);
  write_summary(run_dir, r.cfg, r.metas, r.logs, r.complete);
  return summary_json(r.cfg, r.metas, r.logs, r.complete);
}

std::string to_json(const Manifest& m) {
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"size", f.size}, {"fnv1a", hex64(f.hash)}});
  json j{{"partial", m.partial}, {"episodes", m.episodes}, {"files", files}};
  return j.dump(2) + "\n";
}

Manifest export_artifacts(const fs::path& run_dir) {
  const LoadedRun run = load_run(run_dir);
  fs::create_directories(run_dir / "overlays");
  for (std::size_t i = 0; i < run.metas.size(); ++i) {
    const auto& m = run.metas[i];
    std::string out = "kind,x,y,value\n";
    const fs::path final_map = run_dir / "maps" / episode_stem(m.index) / ("step_" + std::to_string(m.final_t) + "_F.csv");
    if (fs::exists(final_map)) {
      const Grid<double> f = read_grid_csv(final_map);
      for (int y = 0; y < f.size(); ++y)
        for (int x = 0; x < f.size(); ++x)
          out += "cell," + std::to_string(x) + "," + std::to_string(y) + "," + format_double(f(x, y)) + "\n";
    }
    out += "path," + std::to_string(run.cfg.agent.start_x) + "," + std::to_string(run.cfg.agent.start_y) + ",-1\n";
    for (const auto& s : run.logs[i])
      out += "path," + std::to_string(s.uav.pos.x) + "," + std::to_string(s.uav.pos.y) + "," +
             std::to_string(s.step) + "\n";
    write_text(run_dir / "overlays" / (episode_stem(m.index) + ".csv"), out);
  }

  Manifest man;
  man.partial = !run.complete;
  man.episodes = static_cast<int>(run.metas.size());
  std::vector<fs::path> paths;
  for (const auto& e : fs::recursive_directory_iterator(run_dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const std::string data = read_text(p);
    man.files.push_back({fs::relative(p, run_dir).generic_string(), data.size(), fnv1a(data.data(), data.size())});
  }
  write_text(run_dir / "manifest.json", to_json(man));
  return man;
}

}  // namespace pyrofront::io
