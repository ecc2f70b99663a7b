#ifndef PYROFRONT_IO_HPP_
#define PYROFRONT_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pyrofront/config.hpp"
#include "pyrofront/grid.hpp"
#include "pyrofront/mission.hpp"
#include "pyrofront/nn.hpp"

namespace pyrofront::io {

namespace fs = std::filesystem;

// Shortest text that round-trips the double exactly.
std::string format_double(double v);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

void write_grid_csv(const fs::path& path, const Grid<double>& grid);
Grid<double> read_grid_csv(const fs::path& path);
// 8-bit grayscale, values mapped linearly from [lo, hi] onto [0, 255].
void write_grid_pgm(const fs::path& path, const Grid<double>& grid, double lo, double hi);

// Snapshot of the environment grids (F, f, A, phi) and the agent's
// representation (b in belief mode, c otherwise, z = network input) at time t.
void write_snapshot(const fs::path& dir, const EnvState& env, const AgentView& view, double wind_max);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
  std::uint32_t version = 0;
  nn::NetConfig net;
  std::uint64_t config_hash = 0;
  std::size_t num_params = 0;
};

// Writes <path> (binary parameters) and <path>.json (layer shapes, config hash).
void save_checkpoint(const fs::path& path, const nn::ValueNet& net, std::uint64_t config_hash);
nn::ValueNet load_checkpoint(const fs::path& path, CheckpointInfo* info = nullptr);

void write_episode_csv(const fs::path& path, const std::vector<StepLog>& steps, int grid_size);
std::vector<StepLog> read_episode_csv(const fs::path& path);

// Per-episode metadata that the step rows do not carry.
struct EpisodeMeta {
  int index = 0;
  MissionPhase phase = MissionPhase::kTrack;
  double epsilon = 0.0;
  TerminationCause cause = TerminationCause::kMaxIterations;
  int final_t = 0;
  double observed_fraction = 0.0;
};
void write_episode_json(const fs::path& path, const EpisodeMeta& meta);
EpisodeMeta read_episode_json(const fs::path& path);
EpisodeMeta meta_of(const EpisodeResult& r);

// Summary derived only from logged rows, so recomputation from disk is exact.
std::string summary_json(const ExperimentConfig& cfg, const std::vector<EpisodeMeta>& metas,
                         const std::vector<std::vector<StepLog>>& logs, bool complete);
std::string summary_csv(const std::vector<EpisodeMeta>& metas, const std::vector<std::vector<StepLog>>& logs);

// Writes summary.json and summary.csv.
void write_summary(const fs::path& run_dir, const ExperimentConfig& cfg, const std::vector<EpisodeMeta>& metas,
                   const std::vector<std::vector<StepLog>>& logs, bool complete);

// Rebuilds summary.json / summary.csv from config.json and the episode logs.
// Returns the summary text.
std::string recompute_summary(const fs::path& run_dir);

struct ManifestEntry {
  std::string path;  // relative to the run directory
  std::uintmax_t size = 0;
  std::uint64_t hash = 0;
};
struct Manifest {
  bool partial = true;
  int episodes = 0;
  std::vector<ManifestEntry> files;
};

// Writes overlays/ep_<k>.csv (final ignition map merged with the UAV path)
// and manifest.json listing every artifact.
Manifest export_artifacts(const fs::path& run_dir);
std::string to_json(const Manifest& m);

}  // namespace pyrofront::io

#endif  // PYROFRONT_IO_HPP_
