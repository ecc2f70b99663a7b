#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "pyrofront/error.hpp"
#include "pyrofront/nn.hpp"
#include "pyrofront/qlearn.hpp"

using namespace pyrofront;

namespace {

Transition random_transition(int n, Rng& rng) {
  Transition t;
  t.map.resize(static_cast<std::size_t>(n) * n);
  t.next_map.resize(t.map.size());
  for (auto& v : t.map) v = static_cast<float>(uniform01(rng));
  for (auto& v : t.next_map) v = static_cast<float>(uniform01(rng));
  for (auto& v : t.uav) v = uniform01(rng);
  for (auto& v : t.next_uav) v = uniform01(rng);
  t.action = uniform_int(rng, 0, 8);
  t.reward = normal(rng, 0, 1);
  t.done = uniform01(rng) < 0.2;
  return t;
}

TdBatch random_batch(int n, int size, Rng& rng, std::vector<Transition>& storage) {
  storage.clear();
  for (int i = 0; i < size; ++i) storage.push_back(random_transition(n, rng));
  std::vector<const Transition*> ptrs;
  for (const auto& t : storage) ptrs.push_back(&t);
  return make_batch(ptrs, n);
}

}  // namespace

TEST(ValueNet, ZeroWeightsGiveOutputBias) {
  nn::ValueNet net(nn::NetConfig::reduced(8), 3);
  auto blocks = net.param_blocks();
  const auto out_bias = blocks.back();
  ASSERT_EQ(out_bias.count, 9u);
  auto v = net.store().values();
  std::fill(v.begin(), v.end(), 0.0);
  for (std::size_t i = 0; i < 9; ++i) v[out_bias.offset + i] = 0.5 * static_cast<double>(i) - 1.0;
  Rng rng(1);
  nn::Matrix maps = nn::Matrix::Random(64, 3);
  nn::Matrix uav = nn::Matrix::Random(5, 3);
  const nn::Matrix q = net.forward(maps, uav);
  ASSERT_EQ(q.rows(), 9);
  ASSERT_EQ(q.cols(), 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(q(i, j), 0.5 * i - 1.0);
}

TEST(ValueNet, FeatureBlockShapes) {
  nn::ValueNet full(nn::NetConfig::full(16), 1);
  const auto blk = full.feature_block();
  EXPECT_EQ(blk.height, 8);
  EXPECT_EQ(blk.width, 8);
  EXPECT_EQ(blk.channels, 256);
  nn::ValueNet reduced(nn::NetConfig::reduced(16), 1);
  EXPECT_LT(reduced.num_params(), full.num_params() / 20);
  std::size_t total = 0;
  for (const auto& b : reduced.param_blocks()) {
    EXPECT_EQ(b.offset, total);
    total += b.count;
  }
  EXPECT_EQ(total, reduced.num_params());
  EXPECT_THROW(nn::ValueNet(nn::NetConfig::reduced(1), 1), Error);
}

TEST(ValueNet, SeedDeterminesInitialization) {
  nn::ValueNet a(nn::NetConfig::reduced(8), 11), b(nn::NetConfig::reduced(8), 11), c(nn::NetConfig::reduced(8), 12);
  const auto va = a.store().values(), vb = b.store().values(), vc = c.store().values();
  EXPECT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  EXPECT_FALSE(std::equal(va.begin(), va.end(), vc.begin()));
}

TEST(MaskedArgmax, PicksBestValidAndIgnoresShift) {
  const std::vector<double> q = {1, 9, 3, 4, 8, 2, 0, 7, 5};
  ActionSet all;
  for (int i = 0; i < 9; ++i) all.insert(action_from_index(i));
  EXPECT_EQ(masked_argmax(q, all), Action::kNE);
  ActionSet some;
  some.insert(Action::kE);
  some.insert(Action::kW);
  some.insert(Action::kHover);
  EXPECT_EQ(masked_argmax(q, some), Action::kW);
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> r(9);
    for (auto& v : r) v = normal(rng, 0, 1);
    ActionSet mask;
    mask.insert(Action::kHover);
    for (int i = 0; i < 8; ++i)
      if (uniform01(rng) < 0.5) mask.insert(action_from_index(i));
    const double c = normal(rng, 0, 100);
    std::vector<double> shifted(r);
    for (auto& v : shifted) v += c;
    const Action a = masked_argmax(r, mask);
    EXPECT_TRUE(mask.contains(a));
    EXPECT_EQ(masked_argmax(shifted, mask), a);
    for (int i = 0; i < 9; ++i)
      if (mask.contains(action_from_index(i))) EXPECT_GE(r[index_of(a)], r[i]);
  }
  const std::vector<double> ties(9, 1.0);
  EXPECT_EQ(masked_argmax(ties, all), Action::kE);
  EXPECT_THROW(masked_argmax(q, ActionSet{}), Error);
}

TEST(SelectAction, EpsilonExtremes) {
  nn::ValueNet net(nn::NetConfig::reduced(8), 4);
  std::vector<double> map(64, 0.3);
  UavFeatures u{0.1, 0.2, 1.0, 0.0, 0.0};
  ActionSet valid;
  for (Action a : {Action::kE, Action::kN, Action::kHover}) valid.insert(a);
  nn::Matrix uu(5, 1);
  for (int i = 0; i < 5; ++i) uu(i, 0) = u[i];
  const nn::Matrix q = net.forward(map_column(map), uu);
  const Action greedy = masked_argmax(std::span<const double>(q.data(), 9), valid);
  Rng rng(5);
  std::array<int, 9> counts{};
  for (int i = 0; i < 3000; ++i) {
    EXPECT_EQ(select_action(net, map, u, valid, 0.0, rng), greedy);
    ++counts[index_of(select_action(net, map, u, valid, 1.0, rng))];
  }
  for (int i = 0; i < 9; ++i) {
    if (valid.contains(action_from_index(i))) {
      EXPECT_NEAR(counts[i] / 3000.0, 1.0 / 3.0, 0.04);
    } else {
      EXPECT_EQ(counts[i], 0);
    }
  }
}

TEST(Epsilon, LinearDecayThenFloor) {
  TrainConfig cfg;
  EXPECT_DOUBLE_EQ(epsilon_for_episode(cfg, 0, 19), 1.0);
  EXPECT_NEAR(epsilon_for_episode(cfg, 19, 19), 0.1, 1e-15);
  EXPECT_NEAR(epsilon_for_episode(cfg, 10, 20), 0.1, 1e-15);
  EXPECT_NEAR(epsilon_for_episode(cfg, 5, 20), 0.55, 1e-15);
  double prev = 2.0;
  for (int k = 0; k < 19; ++k) {
    const double e = epsilon_for_episode(cfg, k, 19);
    EXPECT_LE(e, prev);
    EXPECT_GE(e, cfg.eps_end);
    prev = e;
  }
}

TEST(TdTargets, TerminalAndZeroDiscount) {
  Rng rng(6);
  std::vector<Transition> items;
  TdBatch batch = random_batch(8, 6, rng, items);
  nn::ValueNet target(nn::NetConfig::reduced(8), 7);
  const auto y0 = td_targets(target, batch, 0.0);
  for (std::size_t j = 0; j < y0.size(); ++j) EXPECT_EQ(y0[j], batch.rewards[j]);
  batch.done.assign(batch.done.size(), false);
  batch.done[0] = true;
  const auto y = td_targets(target, batch, 0.9);
  EXPECT_EQ(y[0], batch.rewards[0]);
  const nn::Matrix qn = target.forward(batch.next_maps, batch.next_uav);
  for (std::size_t j = 1; j < y.size(); ++j)
    EXPECT_NEAR(y[j], batch.rewards[j] + 0.9 * qn.col(static_cast<Eigen::Index>(j)).maxCoeff(), 1e-12);
}

TEST(TdTrainStep, LossFallsOnFrozenBatch) {
  Rng rng(8);
  std::vector<Transition> items;
  const TdBatch batch = random_batch(8, 16, rng, items);
  nn::ValueNet net(nn::NetConfig::reduced(8), 9);
  nn::ValueNet target = net;
  const double first = td_train_step(net, target, batch, 0.9, 1e-2);
  double last = first;
  for (int i = 0; i < 200; ++i) last = td_train_step(net, target, batch, 0.9, 1e-2);
  EXPECT_LT(last, 0.5 * first);
}

TEST(TdTrainStep, ZeroLearningRateKeepsParameters) {
  Rng rng(8);
  std::vector<Transition> items;
  const TdBatch batch = random_batch(8, 4, rng, items);
  nn::ValueNet net(nn::NetConfig::reduced(8), 9);
  nn::ValueNet target = net;
  const std::vector<double> before(net.store().values().begin(), net.store().values().end());
  td_train_step(net, target, batch, 0.9, 0.0);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), net.store().values().begin()));
}

TEST(TdTrainStep, NonFiniteLossThrows) {
  Rng rng(8);
  std::vector<Transition> items;
  TdBatch batch = random_batch(8, 4, rng, items);
  batch.rewards[0] = std::nan("");
  nn::ValueNet net(nn::NetConfig::reduced(8), 9);
  nn::ValueNet target = net;
  try {
    td_train_step(net, target, batch, 0.9, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
  }
}

TEST(GradientCheck, SingleDenseLayer) {
  nn::ParamStore store;
  nn::Dense layer(store, 6, 4);
  Rng rng(10);
  layer.init(store, rng);
  for (auto& v : store.values()) v += 0.1 * normal(rng, 0, 1);
  const nn::Matrix x = nn::Matrix::Random(6, 5);
  const nn::Matrix target = nn::Matrix::Random(4, 5);
  auto loss = [&] { return 0.5 * (layer.forward(x, store) - target).squaredNorm(); };
  store.zero_grads();
  layer.backward(layer.forward(x, store) - target, store, false);
  const std::vector<double> analytic(store.grads().begin(), store.grads().end());
  std::vector<std::size_t> idx(store.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto r = compare_gradients(store.values(), analytic, idx, loss);
  EXPECT_EQ(r.checked, store.size());
  EXPECT_LT(r.max_relative_error, 1e-7);
}

TEST(GradientCheck, ReducedNetwork) {
  nn::ValueNet net(nn::NetConfig::reduced(8), 12);
  Rng rng(13);
  const auto r = gradient_check(net, rng, 200);
  EXPECT_GE(r.checked, 200u);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(GradientCheck, FullNetworkSmallGrid) {
  nn::ValueNet net(nn::NetConfig::full(4), 12);
  Rng rng(14);
  const auto r = gradient_check(net, rng, 60, 2);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(ReplayBuffer, RingOverwriteAndSampling) {
  ReplayBuffer buf(3);
  Rng rng(15);
  EXPECT_THROW(buf.sample(1, rng), Error);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.action = i;
    buf.push(t);
  }
  EXPECT_EQ(buf.size(), 3u);
  std::set<int> seen;
  for (std::size_t i = 0; i < 3; ++i) seen.insert(buf.at(i).action);
  EXPECT_EQ(seen, (std::set<int>{2, 3, 4}));
  for (int i = 0; i < 20; ++i)
    for (auto* t : buf.sample(3, rng)) EXPECT_GE(t->action, 2);
  EXPECT_THROW(buf.sample(4, rng), Error);
  EXPECT_THROW(ReplayBuffer(0), Error);
}

TEST(EncodeUav, ScalesAndHeading) {
  UavState u;
  u.pos = {15, 0};
  u.battery = 50;
  auto f = encode_uav(u, 16);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
  EXPECT_DOUBLE_EQ(f[2], 0.5);
  EXPECT_EQ(f[3], 0.0);
  EXPECT_EQ(f[4], 0.0);
  u.heading = 2;
  f = encode_uav(u, 16);
  EXPECT_NEAR(f[3], 0.0, 1e-15);
  EXPECT_NEAR(f[4], 1.0, 1e-15);
}

TEST(DqnTrainer, ReproducibleAndSyncsTarget) {
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.target_sync = 3;
  auto run = [&](std::uint64_t seed) {
    DqnTrainer tr(cfg, nn::NetConfig::reduced(8), seed);
    Rng data(1), rng(2);
    EXPECT_LT(tr.maybe_train(rng), 0.0);
    for (int i = 0; i < 10; ++i) tr.push(random_transition(8, data));
    std::vector<double> losses;
    for (int i = 0; i < 6; ++i) losses.push_back(tr.maybe_train(rng));
    const auto a = tr.online().store().values();
    const auto b = tr.target().store().values();
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));  // synced at step 6
    EXPECT_EQ(tr.train_steps(), 6);
    return losses;
  };
  EXPECT_EQ(run(5), run(5));
}
