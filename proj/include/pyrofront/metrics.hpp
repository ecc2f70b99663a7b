#ifndef PYROFRONT_METRICS_HPP_
#define PYROFRONT_METRICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pyrofront/grid.hpp"
#include "pyrofront/sim.hpp"
#include "pyrofront/uav.hpp"

namespace pyrofront {

// Tracks cells ever burning during an episode and those observed as burning
// while they truly were.
class CoverageTracker {
 public:
  CoverageTracker() = default;
  explicit CoverageTracker(int n);

  void record_truth(const EnvState& env);
  void record_observation(const Observation& obs, const EnvState& env);

  int detected() const { return detected_count_; }
  int ever_ignited() const { return ignited_count_; }
  // detected / ever ignited; 1 when nothing ever burned.
  double ratio() const;

 private:
  Grid<std::uint8_t> ignited_;
  Grid<std::uint8_t> detected_;
  int ignited_count_ = 0;
  int detected_count_ = 0;
};

double coverage_ratio(int detected, int ever_ignited);

struct BatchView {
  int cells_in_fov = 0;        // n_b
  double frontline_distance = 0.0;  // d_min_b before clamping
};

inline constexpr double kMinFrontlineDistance = 1.0;

// (l / sqrt 2) * mean_b(n_b / max(d_min_b, 1)); 0 for no batches.
double mia(int fov, std::span<const BatchView> batches);

double mia_upper_bound(int fov);

// 8-connected components of burning cells; labels[c] = component id or -1.
struct Components {
  Grid<int> labels;
  int count = 0;
};
Components burning_components(const EnvState& env);

// Burning cell with at least one in-grid 8-neighbour that is not burning.
bool is_frontline(const EnvState& env, Cell c);

// Batches (components) intersecting the FOV at `center`. d_min_b is the
// distance to the nearest frontline cell of b inside the FOV, or to the
// nearest cell of b inside the FOV when none of its in-view cells is on the
// frontline.
std::vector<BatchView> fov_batches(const EnvState& env, Cell center, int fov);

double step_mia(const EnvState& env, Cell center, int fov);

double time_average(std::span<const double> values);

}  // namespace pyrofront

#endif  // PYROFRONT_METRICS_HPP_
