#ifndef PYROFRONT_QLEARN_HPP_
#define PYROFRONT_QLEARN_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pyrofront/config.hpp"
#include "pyrofront/nn.hpp"
#include "pyrofront/rng.hpp"
#include "pyrofront/uav.hpp"

namespace pyrofront {

using UavFeatures = std::array<double, nn::kUavFeatures>;

// (x, y) scaled to [0, 1], battery / 100, heading as (cos, sin); a neutral
// heading encodes as (0, 0).
UavFeatures encode_uav(const UavState& uav, int grid_size);

struct Transition {
  std::vector<float> map;
  UavFeatures uav{};
  int action = 0;
  double reward = 0.0;
  std::vector<float> next_map;
  UavFeatures next_uav{};
  bool done = false;
};

// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }
  // Indices into the buffer; fails when fewer than `batch` items are stored.
  std::vector<std::size_t> sample_indices(int batch, Rng& rng) const;
  std::vector<const Transition*> sample(int batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

nn::Matrix map_column(std::span<const double> map);

// Greedy choice among valid actions; ties go to the lowest index.
Action masked_argmax(std::span<const double> q, const ActionSet& valid);

Action select_action(nn::ValueNet& net, std::span<const double> map, const UavFeatures& uav, const ActionSet& valid,
                     double epsilon, Rng& rng);

double epsilon_for_episode(const TrainConfig& cfg, int tracking_episode, int tracking_episodes);

struct TdBatch {
  nn::Matrix maps;
  nn::Matrix uav;
  nn::Matrix next_maps;
  nn::Matrix next_uav;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<bool> done;
};

TdBatch make_batch(std::span<const Transition* const> items, int grid_size);

// r + gamma * max_a' Q_target(s', a'), or r on terminal transitions.
std::vector<double> td_targets(nn::ValueNet& target_net, const TdBatch& batch, double gamma);

// Mean squared TD error; when `accumulate` is set, adds dL/dtheta into the
// gradient arena (after zeroing it).
double td_loss(nn::ValueNet& net, const TdBatch& batch, std::span<const double> targets, bool accumulate);

// One SGD step; returns the loss before the step. Gradients are clipped to
// global norm `grad_clip` (0 disables). Non-finite losses throw.
double td_train_step(nn::ValueNet& net, nn::ValueNet& target_net, const TdBatch& batch, double gamma, double lr,
                     double grad_clip = 0.0);

// Online/target pair with replay and hard target sync.
class DqnTrainer {
 public:
  DqnTrainer(const TrainConfig& cfg, const nn::NetConfig& net_cfg, std::uint64_t seed);

  nn::ValueNet& online() { return online_; }
  const nn::ValueNet& online() const { return online_; }
  const nn::ValueNet& target() const { return target_; }
  ReplayBuffer& buffer() { return buffer_; }

  void push(Transition t) { buffer_.push(std::move(t)); }
  // Trains on one sampled batch when the buffer holds at least batch_size
  // items; returns the loss, or a negative value when no step was taken.
  double maybe_train(Rng& rng);
  long train_steps() const { return train_steps_; }

 private:
  TrainConfig cfg_;
  nn::ValueNet online_;
  nn::ValueNet target_;
  ReplayBuffer buffer_;
  long train_steps_ = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// Central differences with step h = step * max(1, |theta|) against the
// supplied analytic gradient, over `indices`.
GradCheckResult compare_gradients(std::span<double> params, std::span<const double> analytic,
                                  std::span<const std::size_t> indices, const std::function<double()>& loss,
                                  double step = 1e-4);

// Builds a random batch for `net`, evaluates the TD loss against frozen
// targets and checks about `samples` parameters spread evenly over the
// weight and bias blocks (whole blocks when they are smaller than a share).
GradCheckResult gradient_check(nn::ValueNet& net, Rng& rng, int samples = 200, int batch = 4);

}  // namespace pyrofront

#endif  // PYROFRONT_QLEARN_HPP_
