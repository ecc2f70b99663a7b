#ifndef PYROFRONT_TESTS_HELPERS_HPP_
#define PYROFRONT_TESTS_HELPERS_HPP_

#include <filesystem>
#include <string>

#include "pyrofront/config.hpp"
#include "pyrofront/sim.hpp"

namespace pftest {

// Uniformly vegetated, unburnt, windless environment.
inline pyrofront::EnvState blank_env(int n, double density = 1.0, int veg = 1) {
  pyrofront::EnvState s;
  s.n = n;
  s.ignition = pyrofront::Grid<pyrofront::Ignition>(n, pyrofront::Ignition::kUnburnt);
  s.fuel = pyrofront::Grid<double>(n, density);
  s.initial_fuel = s.fuel;
  s.wind_mag = pyrofront::Grid<double>(n, 0.0);
  s.wind_phase = pyrofront::Grid<double>(n, 0.0);
  s.base_wind_mag = s.wind_mag;
  s.base_wind_phase = s.wind_phase;
  s.density = pyrofront::Grid<double>(n, density);
  s.veg_type = pyrofront::Grid<int>(n, veg);
  return s;
}

inline pyrofront::ErrorMatrix identity_error() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pyrofront_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pftest

#endif  // PYROFRONT_TESTS_HELPERS_HPP_
