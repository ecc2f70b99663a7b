#include "pyrofront/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pyrofront/error.hpp"

namespace pyrofront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
std::uint64_t hash_grid(const Grid<T>& g, std::uint64_t h) {
  return fnv1a(g.data().data(), g.data().size() * sizeof(T), h);
}

}  // namespace

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double EnvState::max_wind() const {
  double m = 0.0;
  for (double a : wind_mag.data()) m = std::max(m, a);
  return m;
}

std::uint64_t EnvState::hash() const {
  std::uint64_t h = fnv1a(&t, sizeof(t));
  h = hash_grid(ignition, h);
  h = hash_grid(fuel, h);
  h = hash_grid(wind_mag, h);
  h = hash_grid(wind_phase, h);
  return h;
}

double initial_wind_phase(WindPattern pattern, int x, int y, int n, double m_phi) {
  switch (pattern) {
    case WindPattern::kLinearX:
      return wrap_angle(x * std::numbers::pi / (m_phi * n));
    case WindPattern::kLinearY:
      return wrap_angle(y * std::numbers::pi / (m_phi * n));
    case WindPattern::kRadial:
      return wrap_angle(std::atan2(y - n / 2.0, x - n / 2.0));
  }
  return 0.0;
}

double initial_wind_magnitude(double amplitude, double eps_rad, double min_dist2) {
  if (!std::isfinite(min_dist2)) return 0.0;
  return amplitude * std::exp(-(9.0 / (2.0 * eps_rad * eps_rad)) * min_dist2);
}

double phase_offset(const EnvConfig& cfg, int t) { return std::numbers::pi * t / cfg.period_phase; }

double magnitude_offset(const EnvConfig& cfg, int t) {
  return cfg.wind_variation * std::sin(std::numbers::pi * t / cfg.period_magnitude);
}

EnvState init_environment(const EnvConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  const int n = cfg.grid_size;
  const int max_fit_radius = (n - 1) / 2;
  if (cfg.patch_radius_min > max_fit_radius) {
    fail(ErrorCode::kInvalidArgument, "vegetation patches of radius " + std::to_string(cfg.patch_radius_min) +
                                          " cannot fit in a " + std::to_string(n) + "x" + std::to_string(n) +
                                          " grid");
  }

  EnvState s;
  s.n = n;
  s.ignition = Grid<Ignition>(n, Ignition::kUnburnt);
  s.density = Grid<double>(n, 0.0);
  s.veg_type = Grid<int>(n, 0);

  for (int k = 0; k < cfg.num_veg_patches; ++k) {
    const int radius = uniform_int(rng, cfg.patch_radius_min, std::min(cfg.patch_radius_max, max_fit_radius));
    const Cell center{uniform_int(rng, radius, n - 1 - radius), uniform_int(rng, radius, n - 1 - radius)};
    const int level = uniform_int(rng, 1, 5);
    const int type = uniform_int(rng, 1, 5);
    for (int y = center.y - radius; y <= center.y + radius; ++y) {
      for (int x = center.x - radius; x <= center.x + radius; ++x) {
        if (!s.density.contains(x, y)) continue;
        if (cell_distance2({x, y}, center) > radius * radius) continue;
        s.density(x, y) = level * cfg.base_density;
        s.veg_type(x, y) = type;
      }
    }
  }

  std::vector<Cell> vegetated;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (s.veg_type(x, y) > 0) vegetated.push_back({x, y});
  if (cfg.num_ignitions > static_cast<int>(vegetated.size())) {
    fail(ErrorCode::kInvalidArgument, "requested " + std::to_string(cfg.num_ignitions) + " ignitions but only " +
                                          std::to_string(vegetated.size()) + " vegetated cells");
  }
  // Partial Fisher-Yates: the first num_ignitions entries are a uniform sample.
  for (int i = 0; i < cfg.num_ignitions; ++i) {
    const int j = uniform_int(rng, i, static_cast<int>(vegetated.size()) - 1);
    std::swap(vegetated[i], vegetated[j]);
    s.ignition[vegetated[i]] = Ignition::kBurning;
  }

  s.initial_fuel = Grid<double>(n, 0.0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) s.initial_fuel(x, y) = s.density(x, y) / cfg.base_density * cfg.base_fuel;
  s.fuel = s.initial_fuel;

  s.base_wind_phase = Grid<double>(n, 0.0);
  s.base_wind_mag = Grid<double>(n, 0.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double min_d2 = std::numeric_limits<double>::infinity();
      for (int i = 0; i < cfg.num_ignitions; ++i) min_d2 = std::min(min_d2, cell_distance2({x, y}, vegetated[i]));
      s.base_wind_phase(x, y) = initial_wind_phase(cfg.wind_pattern, x, y, n, cfg.m_phi);
      s.base_wind_mag(x, y) =
          std::min(cfg.wind_max, initial_wind_magnitude(cfg.wind_amplitude, cfg.eps_rad, min_d2));
    }
  }
  s.wind_mag = Grid<double>(n, 0.0);
  s.wind_phase = Grid<double>(n, 0.0);
  s.t = 0;
  wind_step(s, cfg);
  return s;
}

void wind_step(EnvState& state, const EnvConfig& cfg) {
  const double dphi = phase_offset(cfg, state.t);
  const double da = magnitude_offset(cfg, state.t);
  auto mag = state.wind_mag.data();
  auto phase = state.wind_phase.data();
  auto base_mag = state.base_wind_mag.data();
  auto base_phase = state.base_wind_phase.data();
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::clamp(base_mag[i] + da, 0.0, cfg.wind_max);
    phase[i] = wrap_angle(base_phase[i] + dphi);
  }
}

double SpreadFactors::probability() const { return std::clamp(adjacency * fuel * wind_term, 0.0, 1.0); }

SpreadFactors spread_factors(double dist2, double sigma, double fuel_fraction_remaining, double wind_mag,
                             double wind_phase, double bearing_angle, double max_wind) {
  SpreadFactors f;
  const double two_s2 = 2.0 * sigma * sigma;
  f.adjacency = std::exp(-dist2 / two_s2) / two_s2;
  f.fuel = std::clamp(1.0 - fuel_fraction_remaining, 0.0, 1.0);
  if (max_wind > 0.0) {
    const double parallel = wind_mag * std::cos(std::abs(bearing_angle - wind_phase));
    f.wind_term = 0.5 * (1.0 + parallel / max_wind);
  } else {
    f.wind_term = 0.5;
  }
  return f;
}

double bearing(Cell from, Cell to) { return wrap_angle(std::atan2(to.y - from.y, to.x - from.x)); }

double spread_probability(const EnvState& state, const EnvConfig& cfg, Cell source, Cell target) {
  if (!state.ignition.contains(source) || !state.ignition.contains(target)) {
    fail(ErrorCode::kInvalidArgument, "spread_probability: cell outside grid");
  }
  if (state.ignition[source] != Ignition::kBurning) {
    fail(ErrorCode::kInvalidArgument, "spread_probability: source is not burning");
  }
  if (state.ignition[target] != Ignition::kUnburnt) {
    fail(ErrorCode::kInvalidArgument, "spread_probability: target is not unburnt");
  }
  const double r = cfg.effective_radius();
  const double d2 = cell_distance2(source, target);
  if (d2 > r * r) fail(ErrorCode::kInvalidArgument, "spread_probability: target outside neighborhood");
  const double f0 = state.initial_fuel[source];
  const double remaining = f0 > 0.0 ? state.fuel[source] / f0 : 1.0;
  return spread_factors(d2, cfg.sigma_spread, remaining, state.wind_mag[source], state.wind_phase[source],
                        bearing(source, target), state.max_wind())
      .probability();
}

std::vector<SourceWeight> source_weights(const EnvState& state, const EnvConfig& cfg, Cell target) {
  const int r = cfg.effective_radius();
  std::vector<SourceWeight> out;
  double min_d2 = std::numeric_limits<double>::infinity();
  for (int y = target.y - r; y <= target.y + r; ++y) {
    for (int x = target.x - r; x <= target.x + r; ++x) {
      const Cell c{x, y};
      if (c == target || !state.ignition.contains(c)) continue;
      if (state.ignition[c] != Ignition::kBurning) continue;
      const double d2 = cell_distance2(c, target);
      if (d2 > r * r) continue;
      out.push_back({c, d2});
      min_d2 = std::min(min_d2, d2);
    }
  }
  // Shifted by the smallest squared distance so large radii do not underflow.
  double total = 0.0;
  for (auto& sw : out) {
    sw.weight = std::exp(-(sw.weight - min_d2));
    total += sw.weight;
  }
  for (auto& sw : out) sw.weight /= total;
  return out;
}

double ignition_probability(const EnvState& state, const EnvConfig& cfg, Cell target) {
  if (state.ignition[target] != Ignition::kUnburnt || state.initial_fuel[target] <= 0.0) return 0.0;
  const double max_a = state.max_wind();
  double p = 0.0;
  for (const auto& sw : source_weights(state, cfg, target)) {
    const double f0 = state.initial_fuel[sw.source];
    const double remaining = f0 > 0.0 ? state.fuel[sw.source] / f0 : 1.0;
    const auto f = spread_factors(cell_distance2(sw.source, target), cfg.sigma_spread, remaining,
                                  state.wind_mag[sw.source], state.wind_phase[sw.source],
                                  bearing(sw.source, target), max_a);
    p += sw.weight * f.probability();
  }
  return std::clamp(p, 0.0, 1.0);
}

double decayed_fuel(const EnvState& state, double wind_max_cap, Cell c) {
  const double max_a = state.max_wind();
  const double ratio = max_a > 0.0 ? state.wind_mag[c] / max_a : state.wind_mag[c] / wind_max_cap;
  return state.fuel[c] * std::exp(-state.veg_type[c] * ratio);
}

bool burns_out(const EnvConfig& cfg, double fuel) { return fuel <= cfg.burnout_fuel * cfg.base_fuel; }

void env_step(EnvState& state, const EnvConfig& cfg, Rng& rng) {
  if (!state.frozen) {
    const int n = state.n;
    Grid<Ignition> next = state.ignition;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (state.ignition(x, y) != Ignition::kUnburnt) continue;
        const double p = ignition_probability(state, cfg, {x, y});
        if (p > 0.0 && uniform01(rng) < p) next(x, y) = Ignition::kBurning;
      }
    }

    const double noise_std = cfg.fuel_noise * cfg.base_density;
    Grid<double> fuel = state.fuel;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (state.ignition(x, y) != Ignition::kBurning) continue;
        double f = decayed_fuel(state, cfg.wind_max, {x, y});
        if (noise_std > 0.0) f += normal(rng, 0.0, noise_std);
        f = std::clamp(f, 0.0, state.fuel(x, y));
        if (burns_out(cfg, f)) {
          f = 0.0;
          next(x, y) = Ignition::kBurnt;
        }
        fuel(x, y) = f;
      }
    }
    state.ignition = std::move(next);
    state.fuel = std::move(fuel);
  }
  ++state.t;
  wind_step(state, cfg);
}

void prepare_scenario(EnvState& state, const EnvConfig& cfg, Scenario scenario, Rng& rng) {
  if (scenario != Scenario::kStaticBatch) return;
  for (int i = 0; i < cfg.static_warmup_steps; ++i) env_step(state, cfg, rng);
  state.frozen = true;
}

}  // namespace pyrofront
