#include "pyrofront/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pyrofront/error.hpp"

namespace pyrofront {

UavFeatures encode_uav(const UavState& uav, int grid_size) {
  const double scale = grid_size > 1 ? 1.0 / (grid_size - 1) : 0.0;
  UavFeatures f{};
  f[0] = uav.pos.x * scale;
  f[1] = uav.pos.y * scale;
  f[2] = uav.battery / 100.0;
  if (uav.heading) {
    const double a = *uav.heading * std::numbers::pi / 4.0;
    f[3] = std::cos(a);
    f[4] = std::sin(a);
  }
  return f;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) fail(ErrorCode::kInvalidArgument, "replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int batch, Rng& rng) const {
  if (batch <= 0 || static_cast<std::size_t>(batch) > items_.size()) {
    fail(ErrorCode::kState, "replay buffer holds " + std::to_string(items_.size()) + " transitions, batch of " +
                                std::to_string(batch) + " requested");
  }
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(items_.size()) - 1));
  return idx;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, Rng& rng) const {
  std::vector<const Transition*> out;
  for (auto i : sample_indices(batch, rng)) out.push_back(&items_[i]);
  return out;
}

nn::Matrix map_column(std::span<const double> map) {
  nn::Matrix m(static_cast<Eigen::Index>(map.size()), 1);
  for (std::size_t i = 0; i < map.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = map[i];
  return m;
}

Action masked_argmax(std::span<const double> q, const ActionSet& valid) {
  if (valid.empty()) fail(ErrorCode::kInvalidArgument, "masked_argmax: empty action set");
  int best = -1;
  for (int i = 0; i < kNumActions; ++i) {
    if (!valid.contains(action_from_index(i))) continue;
    if (best < 0 || q[i] > q[best]) best = i;
  }
  return action_from_index(best);
}

Action select_action(nn::ValueNet& net, std::span<const double> map, const UavFeatures& uav, const ActionSet& valid,
                     double epsilon, Rng& rng) {
  if (valid.empty()) fail(ErrorCode::kInvalidArgument, "select_action: empty action set");
  if (uniform01(rng) < epsilon) {
    const auto options = valid.to_vector();
    return options[uniform_int(rng, 0, static_cast<int>(options.size()) - 1)];
  }
  nn::Matrix u(nn::kUavFeatures, 1);
  for (int i = 0; i < nn::kUavFeatures; ++i) u(i, 0) = uav[i];
  const nn::Matrix q = net.forward(map_column(map), u);
  return masked_argmax(std::span<const double>(q.data(), kNumActions), valid);
}

double epsilon_for_episode(const TrainConfig& cfg, int tracking_episode, int tracking_episodes) {
  const double horizon = std::max(1.0, cfg.eps_decay_fraction * tracking_episodes);
  const double frac = std::clamp(tracking_episode / horizon, 0.0, 1.0);
  return std::lerp(cfg.eps_start, cfg.eps_end, frac);
}

TdBatch make_batch(std::span<const Transition* const> items, int grid_size) {
  const auto cells = static_cast<Eigen::Index>(grid_size) * grid_size;
  const auto b = static_cast<Eigen::Index>(items.size());
  TdBatch out;
  out.maps.resize(cells, b);
  out.next_maps.resize(cells, b);
  out.uav.resize(nn::kUavFeatures, b);
  out.next_uav.resize(nn::kUavFeatures, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = *items[j];
    if (static_cast<Eigen::Index>(t.map.size()) != cells || static_cast<Eigen::Index>(t.next_map.size()) != cells) {
      fail(ErrorCode::kInvalidArgument, "transition map size does not match the grid");
    }
    for (Eigen::Index i = 0; i < cells; ++i) {
      out.maps(i, j) = t.map[i];
      out.next_maps(i, j) = t.next_map[i];
    }
    for (int i = 0; i < nn::kUavFeatures; ++i) {
      out.uav(i, j) = t.uav[i];
      out.next_uav(i, j) = t.next_uav[i];
    }
    out.actions.push_back(t.action);
    out.rewards.push_back(t.reward);
    out.done.push_back(t.done);
  }
  return out;
}

std::vector<double> td_targets(nn::ValueNet& target_net, const TdBatch& batch, double gamma) {
  std::vector<double> y(batch.rewards);
  if (gamma == 0.0) return y;
  const nn::Matrix q_next = target_net.forward(batch.next_maps, batch.next_uav);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!batch.done[j]) y[j] += gamma * q_next.col(static_cast<Eigen::Index>(j)).maxCoeff();
  }
  return y;
}

double td_loss(nn::ValueNet& net, const TdBatch& batch, std::span<const double> targets, bool accumulate) {
  const nn::Matrix q = net.forward(batch.maps, batch.uav);
  const auto b = static_cast<double>(batch.actions.size());
  nn::Matrix dq = nn::Matrix::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (std::size_t j = 0; j < batch.actions.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double err = q(batch.actions[j], col) - targets[j];
    loss += err * err;
    dq(batch.actions[j], col) = 2.0 * err / b;
  }
  loss /= b;
  if (accumulate) {
    net.store().zero_grads();
    net.backward(dq);
  }
  return loss;
}

double td_train_step(nn::ValueNet& net, nn::ValueNet& target_net, const TdBatch& batch, double gamma, double lr,
                     double grad_clip) {
  const auto targets = td_targets(target_net, batch, gamma);
  const double loss = td_loss(net, batch, targets, true);
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "non-finite TD loss " << loss << " (batch " << batch.actions.size() << ", rewards";
    for (double r : batch.rewards) os << ' ' << r;
    os << ')';
    fail(ErrorCode::kNumeric, os.str());
  }
  auto grads = net.store().grads();
  double scale = lr;
  if (grad_clip > 0.0) {
    double norm2 = 0.0;
    for (double g : grads) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm > grad_clip) scale *= grad_clip / norm;
  }
  auto params = net.store().values();
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= scale * grads[i];
  return loss;
}

DqnTrainer::DqnTrainer(const TrainConfig& cfg, const nn::NetConfig& net_cfg, std::uint64_t seed)
    : cfg_(cfg), online_(net_cfg, seed), target_(online_), buffer_(static_cast<std::size_t>(cfg.buffer_capacity)) {}

double DqnTrainer::maybe_train(Rng& rng) {
  if (buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) return -1.0;
  const auto items = buffer_.sample(cfg_.batch_size, rng);
  const TdBatch batch = make_batch(items, online_.config().grid);
  const double loss = td_train_step(online_, target_, batch, cfg_.gamma, cfg_.learning_rate, cfg_.grad_clip);
  ++train_steps_;
  if (train_steps_ % cfg_.target_sync == 0) target_ = online_;
  return loss;
}

GradCheckResult compare_gradients(std::span<double> params, std::span<const double> analytic,
                                  std::span<const std::size_t> indices, const std::function<double()>& loss,
                                  double step) {
  // Below this magnitude both gradients are treated as zero-scale.
  constexpr double kScaleFloor = 1e-6;
  GradCheckResult out;
  for (std::size_t i : indices) {
    const double saved = params[i];
    const double h = step * std::max(1.0, std::abs(saved));
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), kScaleFloor});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(numeric - analytic[i]) / denom);
    ++out.checked;
  }
  return out;
}

GradCheckResult gradient_check(nn::ValueNet& net, Rng& rng, int samples, int batch_size) {
  const int n = net.config().grid;
  std::vector<Transition> items(batch_size);
  for (auto& t : items) {
    t.map.resize(static_cast<std::size_t>(n) * n);
    t.next_map.resize(t.map.size());
    for (auto& v : t.map) v = static_cast<float>(uniform01(rng));
    for (auto& v : t.next_map) v = static_cast<float>(uniform01(rng));
    for (auto& v : t.uav) v = 2.0 * uniform01(rng) - 1.0;
    for (auto& v : t.next_uav) v = 2.0 * uniform01(rng) - 1.0;
    t.action = uniform_int(rng, 0, kNumActions - 1);
    t.reward = normal(rng, 0.0, 1.0);
    t.done = uniform01(rng) < 0.25;
  }
  std::vector<const Transition*> ptrs;
  for (const auto& t : items) ptrs.push_back(&t);
  const TdBatch batch = make_batch(ptrs, n);

  nn::ValueNet frozen = net;
  const auto targets = td_targets(frozen, batch, 0.9);
  td_loss(net, batch, targets, true);
  const std::vector<double> analytic(net.store().grads().begin(), net.store().grads().end());

  // Spread the sample over every weight/bias block so each layer type is
  // exercised, then draw distinct indices within each block.
  std::vector<std::size_t> indices;
  const auto blocks = net.param_blocks();
  const std::size_t per_block =
      std::max<std::size_t>(1, (static_cast<std::size_t>(std::max(samples, 1)) + blocks.size() - 1) / blocks.size());
  for (const auto& blk : blocks) {
    std::vector<std::size_t> pool(blk.count);
    for (std::size_t i = 0; i < blk.count; ++i) pool[i] = blk.offset + i;
    const std::size_t take = std::min(per_block, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = static_cast<std::size_t>(uniform_int(rng, static_cast<int>(i), static_cast<int>(pool.size()) - 1));
      std::swap(pool[i], pool[j]);
      indices.push_back(pool[i]);
    }
  }
  // Small blocks leave the quota short; top up from the unused parameters.
  std::vector<std::uint8_t> used(net.num_params(), 0);
  for (auto i : indices) used[i] = 1;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < used.size(); ++i)
    if (!used[i]) rest.push_back(i);
  while (indices.size() < static_cast<std::size_t>(samples) && !rest.empty()) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(rest.size()) - 1));
    indices.push_back(rest[j]);
    rest[j] = rest.back();
    rest.pop_back();
  }
  return compare_gradients(net.store().values(), analytic, indices,
                           [&] { return td_loss(net, batch, targets, false); });
}

}  // namespace pyrofront
