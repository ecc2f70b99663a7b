#ifndef PYROFRONT_NN_HPP_
#define PYROFRONT_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pyrofront/rng.hpp"

namespace pyrofront::nn {

// Activations are (features x batch); conv features are channel-major
// (c * H * W + y * W + x).
using Matrix = Eigen::MatrixXd;

// Flat parameter and gradient arenas; layers address them by offset so a
// network copies by value.
class ParamStore {
 public:
  std::size_t allocate(std::size_t count);
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> grads() { return grads_; }
  std::span<const double> grads() const { return grads_; }
  double* value_ptr(std::size_t off) { return values_.data() + off; }
  const double* value_ptr(std::size_t off) const { return values_.data() + off; }
  double* grad_ptr(std::size_t off) { return grads_.data() + off; }
  void zero_grads();

 private:
  std::vector<double> values_;
  std::vector<double> grads_;
};

struct Dense {
  int in = 0;
  int out = 0;
  std::size_t w_off = 0;  // out x in, column-major
  std::size_t b_off = 0;
  Matrix input;

  Dense(ParamStore& store, int in_dim, int out_dim);
  Matrix forward(const Matrix& x, const ParamStore& store);
  Matrix backward(const Matrix& dy, ParamStore& store, bool need_input_grad);
  void init(ParamStore& store, Rng& rng) const;
};

// 3x3 convolution, zero padding 1.
struct Conv2d {
  int in_ch = 0;
  int out_ch = 0;
  int height = 0;
  int width = 0;
  int stride = 1;
  int out_h = 0;
  int out_w = 0;
  std::size_t w_off = 0;  // out_ch x (in_ch * 9), column-major
  std::size_t b_off = 0;
  Matrix cols;
  int batch = 0;

  Conv2d(ParamStore& store, int in_channels, int out_channels, int h, int w, int stride_);
  Matrix forward(const Matrix& x, const ParamStore& store);
  Matrix backward(const Matrix& dy, ParamStore& store, bool need_input_grad);
  void init(ParamStore& store, Rng& rng) const;
  int out_size() const { return out_ch * out_h * out_w; }
};

struct Tanh {
  Matrix output;
  Matrix forward(const Matrix& x, const ParamStore&);
  Matrix backward(const Matrix& dy, ParamStore&, bool);
  void init(ParamStore&, Rng&) const {}
};

using Layer = std::variant<Dense, Conv2d, Tanh>;

struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t count = 0;
};

class Sequential {
 public:
  void add(Layer layer) { layers_.push_back(std::move(layer)); }
  Matrix forward(const Matrix& x, const ParamStore& store);
  // Returns the gradient w.r.t. the input (empty when need_input_grad is
  // false); parameter gradients are accumulated into the store.
  Matrix backward(const Matrix& dy, ParamStore& store, bool need_input_grad);
  void init(ParamStore& store, Rng& rng) const;
  const std::vector<Layer>& layers() const { return layers_; }
  void collect_blocks(const std::string& prefix, std::vector<ParamBlock>& out) const;

 private:
  std::vector<Layer> layers_;
};

inline constexpr int kUavFeatures = 5;  // x, y, battery, cos(heading), sin(heading)
inline constexpr int kLatent = 16;
inline constexpr int kOutputs = 9;

struct NetConfig {
  int grid = 16;
  int conv1 = 8;
  int conv2 = 16;
  int state_hidden = 16;
  int head_hidden = 32;

  static NetConfig reduced(int grid);
  static NetConfig full(int grid);
  bool operator==(const NetConfig&) const = default;
};

// Two-branch value network: conv map branch and three-layer UAV-state branch,
// each ending in a kLatent vector, fused by a dense head to kOutputs values.
class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(const NetConfig& cfg, std::uint64_t seed);

  // maps: (grid^2 x B), uav: (kUavFeatures x B) -> (kOutputs x B).
  Matrix forward(const Matrix& maps, const Matrix& uav);
  // Accumulates parameter gradients for dL/dq.
  void backward(const Matrix& dq);

  const NetConfig& config() const { return cfg_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }
  std::size_t num_params() const { return store_.size(); }

  // Shape of the spatial feature block fed to the flattening layer.
  struct Block {
    int channels, height, width;
  };
  Block feature_block() const;
  // Weight and bias blocks of every parameterized layer, in arena order.
  std::vector<ParamBlock> param_blocks() const;
  std::string describe() const;

 private:
  NetConfig cfg_;
  ParamStore store_;
  Sequential map_branch_;
  Sequential state_branch_;
  Sequential head_;
};

}  // namespace pyrofront::nn

#endif  // PYROFRONT_NN_HPP_
