#include "pyrofront/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace pyrofront {

CoverageTracker::CoverageTracker(int n) : ignited_(n, 0), detected_(n, 0) {}

void CoverageTracker::record_truth(const EnvState& env) {
  for (int y = 0; y < env.n; ++y) {
    for (int x = 0; x < env.n; ++x) {
      if (env.ignition(x, y) != Ignition::kUnburnt && !ignited_(x, y)) {
        ignited_(x, y) = 1;
        ++ignited_count_;
      }
    }
  }
}

void CoverageTracker::record_observation(const Observation& obs, const EnvState& env) {
  for (const auto& r : obs.readings) {
    if (r.reading != Ignition::kBurning || env.ignition[r.cell] != Ignition::kBurning) continue;
    if (!detected_[r.cell]) {
      detected_[r.cell] = 1;
      ++detected_count_;
    }
  }
}

double CoverageTracker::ratio() const { return coverage_ratio(detected_count_, ignited_count_); }

double coverage_ratio(int detected, int ever_ignited) {
  if (ever_ignited <= 0) return 1.0;
  return static_cast<double>(detected) / static_cast<double>(ever_ignited);
}

double mia(int fov, std::span<const BatchView> batches) {
  if (batches.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : batches) sum += b.cells_in_fov / std::max(b.frontline_distance, kMinFrontlineDistance);
  return fov / std::sqrt(2.0) * (sum / static_cast<double>(batches.size()));
}

double mia_upper_bound(int fov) { return std::pow(fov, 3) / std::sqrt(2.0); }

Components burning_components(const EnvState& env) {
  Components out;
  out.labels = Grid<int>(env.n, -1);
  std::vector<Cell> stack;
  for (int y = 0; y < env.n; ++y) {
    for (int x = 0; x < env.n; ++x) {
      if (env.ignition(x, y) != Ignition::kBurning || out.labels(x, y) >= 0) continue;
      const int id = out.count++;
      out.labels(x, y) = id;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const Cell nb{c.x + dx, c.y + dy};
            if (!env.ignition.contains(nb) || out.labels[nb] >= 0) continue;
            if (env.ignition[nb] != Ignition::kBurning) continue;
            out.labels[nb] = id;
            stack.push_back(nb);
          }
        }
      }
    }
  }
  return out;
}

bool is_frontline(const EnvState& env, Cell c) {
  if (env.ignition[c] != Ignition::kBurning) return false;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const Cell nb{c.x + dx, c.y + dy};
      if (env.ignition.contains(nb) && env.ignition[nb] != Ignition::kBurning) return true;
    }
  }
  return false;
}

std::vector<BatchView> fov_batches(const EnvState& env, Cell center, int fov) {
  const Components comps = burning_components(env);
  struct Acc {
    int cells = 0;
    double front = std::numeric_limits<double>::infinity();
    double any = std::numeric_limits<double>::infinity();
  };
  std::map<int, Acc> acc;
  for (Cell c : fov_cells(center, fov, env.n)) {
    const int id = comps.labels[c];
    if (id < 0) continue;
    Acc& a = acc[id];
    ++a.cells;
    const double d = cell_distance(c, center);
    a.any = std::min(a.any, d);
    if (is_frontline(env, c)) a.front = std::min(a.front, d);
  }
  std::vector<BatchView> out;
  for (const auto& [id, a] : acc) out.push_back({a.cells, std::isfinite(a.front) ? a.front : a.any});
  return out;
}

double step_mia(const EnvState& env, Cell center, int fov) {
  const auto batches = fov_batches(env, center, fov);
  return mia(fov, batches);
}

double time_average(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace pyrofront
