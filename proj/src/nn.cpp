#include "pyrofront/nn.hpp"

#include <cmath>
#include <sstream>

#include "pyrofront/error.hpp"

namespace pyrofront::nn {

namespace {

using MatMap = Eigen::Map<Matrix>;
using ConstMatMap = Eigen::Map<const Matrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

void glorot_uniform(ParamStore& store, std::size_t off, std::size_t count, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  double* p = store.value_ptr(off);
  for (std::size_t i = 0; i < count; ++i) p[i] = (2.0 * uniform01(rng) - 1.0) * limit;
}

}  // namespace

std::size_t ParamStore::allocate(std::size_t count) {
  const std::size_t off = values_.size();
  values_.resize(off + count, 0.0);
  grads_.resize(off + count, 0.0);
  return off;
}

void ParamStore::zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

Dense::Dense(ParamStore& store, int in_dim, int out_dim) : in(in_dim), out(out_dim) {
  w_off = store.allocate(static_cast<std::size_t>(in) * out);
  b_off = store.allocate(out);
}

Matrix Dense::forward(const Matrix& x, const ParamStore& store) {
  if (x.rows() != in) {
    fail(ErrorCode::kInvalidArgument,
         "dense layer expects " + std::to_string(in) + " inputs, got " + std::to_string(x.rows()));
  }
  input = x;
  ConstMatMap w(store.value_ptr(w_off), out, in);
  ConstVecMap b(store.value_ptr(b_off), out);
  Matrix y = w * x;
  y.colwise() += b;
  return y;
}

Matrix Dense::backward(const Matrix& dy, ParamStore& store, bool need_input_grad) {
  MatMap dw(store.grad_ptr(w_off), out, in);
  VecMap db(store.grad_ptr(b_off), out);
  dw.noalias() += dy * input.transpose();
  db += dy.rowwise().sum();
  if (!need_input_grad) return {};
  ConstMatMap w(store.value_ptr(w_off), out, in);
  return w.transpose() * dy;
}

void Dense::init(ParamStore& store, Rng& rng) const {
  glorot_uniform(store, w_off, static_cast<std::size_t>(in) * out, in, out, rng);
  std::fill_n(store.value_ptr(b_off), out, 0.0);
}

Conv2d::Conv2d(ParamStore& store, int in_channels, int out_channels, int h, int w, int stride_)
    : in_ch(in_channels), out_ch(out_channels), height(h), width(w), stride(stride_) {
  out_h = (height + 2 - 3) / stride + 1;
  out_w = (width + 2 - 3) / stride + 1;
  w_off = store.allocate(static_cast<std::size_t>(out_ch) * in_ch * 9);
  b_off = store.allocate(out_ch);
}

Matrix Conv2d::forward(const Matrix& x, const ParamStore& store) {
  const int hw_in = height * width;
  if (x.rows() != in_ch * hw_in) {
    fail(ErrorCode::kInvalidArgument, "conv layer expects " + std::to_string(in_ch * hw_in) + " inputs, got " +
                                          std::to_string(x.rows()));
  }
  batch = static_cast<int>(x.cols());
  const int hw_out = out_h * out_w;
  cols.setZero(in_ch * 9, static_cast<Eigen::Index>(hw_out) * batch);
  for (int b = 0; b < batch; ++b) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index col = static_cast<Eigen::Index>(b) * hw_out + oy * out_w + ox;
        for (int c = 0; c < in_ch; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride - 1 + ky;
            if (iy < 0 || iy >= height) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride - 1 + kx;
              if (ix < 0 || ix >= width) continue;
              cols(c * 9 + ky * 3 + kx, col) = x(c * hw_in + iy * width + ix, b);
            }
          }
        }
      }
    }
  }
  ConstMatMap w(store.value_ptr(w_off), out_ch, in_ch * 9);
  ConstVecMap bias(store.value_ptr(b_off), out_ch);
  Matrix out = w * cols;
  out.colwise() += bias;
  Matrix y(static_cast<Eigen::Index>(out_ch) * hw_out, batch);
  for (int b = 0; b < batch; ++b)
    for (int co = 0; co < out_ch; ++co)
      y.col(b).segment(static_cast<Eigen::Index>(co) * hw_out, hw_out) =
          out.row(co).segment(static_cast<Eigen::Index>(b) * hw_out, hw_out).transpose();
  return y;
}

Matrix Conv2d::backward(const Matrix& dy, ParamStore& store, bool need_input_grad) {
  const int hw_out = out_h * out_w;
  Matrix dout(out_ch, static_cast<Eigen::Index>(hw_out) * batch);
  for (int b = 0; b < batch; ++b)
    for (int co = 0; co < out_ch; ++co)
      dout.row(co).segment(static_cast<Eigen::Index>(b) * hw_out, hw_out) =
          dy.col(b).segment(static_cast<Eigen::Index>(co) * hw_out, hw_out).transpose();

  MatMap dw(store.grad_ptr(w_off), out_ch, in_ch * 9);
  VecMap db(store.grad_ptr(b_off), out_ch);
  dw.noalias() += dout * cols.transpose();
  db += dout.rowwise().sum();
  if (!need_input_grad) return {};

  ConstMatMap w(store.value_ptr(w_off), out_ch, in_ch * 9);
  const Matrix dcols = w.transpose() * dout;
  const int hw_in = height * width;
  Matrix dx = Matrix::Zero(static_cast<Eigen::Index>(in_ch) * hw_in, batch);
  for (int b = 0; b < batch; ++b) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index col = static_cast<Eigen::Index>(b) * hw_out + oy * out_w + ox;
        for (int c = 0; c < in_ch; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride - 1 + ky;
            if (iy < 0 || iy >= height) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride - 1 + kx;
              if (ix < 0 || ix >= width) continue;
              dx(c * hw_in + iy * width + ix, b) += dcols(c * 9 + ky * 3 + kx, col);
            }
          }
        }
      }
    }
  }
  return dx;
}

void Conv2d::init(ParamStore& store, Rng& rng) const {
  glorot_uniform(store, w_off, static_cast<std::size_t>(out_ch) * in_ch * 9, in_ch * 9, out_ch * 9, rng);
  std::fill_n(store.value_ptr(b_off), out_ch, 0.0);
}

Matrix Tanh::forward(const Matrix& x, const ParamStore&) {
  // Eigen's double tanh is scalar; exp is vectorized.
  output = (1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0)).matrix();
  return output;
}

Matrix Tanh::backward(const Matrix& dy, ParamStore&, bool) {
  return (dy.array() * (1.0 - output.array().square())).matrix();
}

Matrix Sequential::forward(const Matrix& x, const ParamStore& store) {
  Matrix h = x;
  for (auto& layer : layers_) h = std::visit([&](auto& l) { return l.forward(h, store); }, layer);
  return h;
}

Matrix Sequential::backward(const Matrix& dy, ParamStore& store, bool need_input_grad) {
  Matrix g = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const bool need = need_input_grad || i > 0;
    g = std::visit([&](auto& l) { return l.backward(g, store, need); }, layers_[i]);
  }
  return g;
}

void Sequential::init(ParamStore& store, Rng& rng) const {
  for (const auto& layer : layers_) std::visit([&](const auto& l) { l.init(store, rng); }, layer);
}

void Sequential::collect_blocks(const std::string& prefix, std::vector<ParamBlock>& out) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string base = prefix + "." + std::to_string(i);
    if (const auto* d = std::get_if<Dense>(&layers_[i])) {
      out.push_back({base + ".dense.w", d->w_off, static_cast<std::size_t>(d->in) * d->out});
      out.push_back({base + ".dense.b", d->b_off, static_cast<std::size_t>(d->out)});
    } else if (const auto* c = std::get_if<Conv2d>(&layers_[i])) {
      out.push_back({base + ".conv.w", c->w_off, static_cast<std::size_t>(c->out_ch) * c->in_ch * 9});
      out.push_back({base + ".conv.b", c->b_off, static_cast<std::size_t>(c->out_ch)});
    }
  }
}

NetConfig NetConfig::reduced(int grid) { return NetConfig{grid, 8, 16, 16, 32}; }
NetConfig NetConfig::full(int grid) { return NetConfig{grid, 64, 256, 64, 128}; }

ValueNet::ValueNet(const NetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.grid < 2) fail(ErrorCode::kInvalidArgument, "value net needs a grid of at least 2x2");
  Conv2d c1(store_, 1, cfg.conv1, cfg.grid, cfg.grid, 1);
  Conv2d c2(store_, cfg.conv1, cfg.conv2, c1.out_h, c1.out_w, 2);
  const int flat = c2.out_size();
  map_branch_.add(std::move(c1));
  map_branch_.add(Tanh{});
  map_branch_.add(std::move(c2));
  map_branch_.add(Tanh{});
  map_branch_.add(Dense(store_, flat, kLatent));
  map_branch_.add(Tanh{});

  state_branch_.add(Dense(store_, kUavFeatures, cfg.state_hidden));
  state_branch_.add(Tanh{});
  state_branch_.add(Dense(store_, cfg.state_hidden, cfg.state_hidden));
  state_branch_.add(Tanh{});
  state_branch_.add(Dense(store_, cfg.state_hidden, kLatent));
  state_branch_.add(Tanh{});

  head_.add(Dense(store_, 2 * kLatent, cfg.head_hidden));
  head_.add(Tanh{});
  head_.add(Dense(store_, cfg.head_hidden, kOutputs));

  Rng rng(seed);
  map_branch_.init(store_, rng);
  state_branch_.init(store_, rng);
  head_.init(store_, rng);
}

Matrix ValueNet::forward(const Matrix& maps, const Matrix& uav) {
  if (maps.rows() != static_cast<Eigen::Index>(cfg_.grid) * cfg_.grid || uav.rows() != kUavFeatures ||
      maps.cols() != uav.cols()) {
    fail(ErrorCode::kInvalidArgument, "value net input shape mismatch: map " + std::to_string(maps.rows()) + "x" +
                                          std::to_string(maps.cols()) + ", uav " + std::to_string(uav.rows()) +
                                          "x" + std::to_string(uav.cols()));
  }
  const Matrix map_latent = map_branch_.forward(maps, store_);
  const Matrix state_latent = state_branch_.forward(uav, store_);
  Matrix fused(2 * kLatent, maps.cols());
  fused.topRows(kLatent) = map_latent;
  fused.bottomRows(kLatent) = state_latent;
  return head_.forward(fused, store_);
}

void ValueNet::backward(const Matrix& dq) {
  const Matrix dfused = head_.backward(dq, store_, true);
  map_branch_.backward(dfused.topRows(kLatent), store_, false);
  state_branch_.backward(dfused.bottomRows(kLatent), store_, false);
}

ValueNet::Block ValueNet::feature_block() const {
  const auto& c2 = std::get<Conv2d>(map_branch_.layers()[2]);
  return {c2.out_ch, c2.out_h, c2.out_w};
}

std::vector<ParamBlock> ValueNet::param_blocks() const {
  std::vector<ParamBlock> out;
  map_branch_.collect_blocks("map", out);
  state_branch_.collect_blocks("state", out);
  head_.collect_blocks("head", out);
  return out;
}

std::string ValueNet::describe() const {
  std::ostringstream os;
  const auto block = feature_block();
  os << "map " << cfg_.grid << "x" << cfg_.grid << " -> conv " << cfg_.conv1 << " -> conv/2 " << block.height << "x"
     << block.width << "x" << block.channels << " -> " << kLatent << "; uav " << kUavFeatures << " -> "
     << cfg_.state_hidden << " -> " << cfg_.state_hidden << " -> " << kLatent << "; head " << 2 * kLatent << " -> "
     << cfg_.head_hidden << " -> " << kOutputs << " (" << num_params() << " params)";
  return os.str();
}

}  // namespace pyrofront::nn
