#ifndef PYROFRONT_GRID_HPP_
#define PYROFRONT_GRID_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace pyrofront {

// Integer cell coordinates; x grows east, y grows north.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

inline double cell_distance(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double cell_distance2(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Square N x N grid stored row-major (index = y * N + x).
template <class T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n, T fill = T{}) : n_(n), cells_(static_cast<std::size_t>(n) * n, fill) {}

  int size() const { return n_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < n_ && y < n_; }
  bool contains(Cell c) const { return contains(c.x, c.y); }

  T& operator()(int x, int y) { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const { return cells_[index(x, y)]; }
  T& operator[](Cell c) { return cells_[index(c.x, c.y)]; }
  const T& operator[](Cell c) const { return cells_[index(c.x, c.y)]; }

  std::span<T> data() { return cells_; }
  std::span<const T> data() const { return cells_; }

  void fill(T value) { std::fill(cells_.begin(), cells_.end(), value); }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * n_ + x; }

  int n_ = 0;
  std::vector<T> cells_;
};

}  // namespace pyrofront

#endif  // PYROFRONT_GRID_HPP_
