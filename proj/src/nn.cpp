#include "adnet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adnet/parallel.hpp"

namespace adnet::nn {

namespace {

void check_4d(const Tensor& t, const char* what) {
  if (t.ndim() != 4)
    throw DimensionError(std::string(what) + " must be 4-D, got " + shape_str(t.shape()));
}

// Patch matrix [inC*kH*kW x outH*outW] for one sample.
void im2col(const double* x, int in_c, int h, int w, int kh, int kw, int stride,
            int pad, int out_h, int out_w, double* cols) {
  const int patch = out_h * out_w;
  for (int c = 0; c < in_c; ++c) {
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj) {
        double* row = cols + static_cast<std::size_t>((c * kh + ki) * kw + kj) * patch;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ki - pad;
          double* dst = row + static_cast<std::size_t>(oy) * out_w;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + out_w, 0.0);
            continue;
          }
          const double* src = x + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kj - pad;
            dst[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* cols, int in_c, int h, int w, int kh, int kw, int stride,
            int pad, int out_h, int out_w, double* dx) {
  const int patch = out_h * out_w;
  for (int c = 0; c < in_c; ++c) {
    for (int ki = 0; ki < kh; ++ki) {
      for (int kj = 0; kj < kw; ++kj) {
        const double* row = cols + static_cast<std::size_t>((c * kh + ki) * kw + kj) * patch;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ki - pad;
          if (iy < 0 || iy >= h) continue;
          double* dst = dx + (static_cast<std::size_t>(c) * h + iy) * w;
          const double* src = row + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kj - pad;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

using MatRM = Tensor::MatrixRM;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

}  // namespace

std::pair<Tensor, Conv2dCache> conv2d_forward(const Conv2d& layer, const Tensor& x) {
  check_4d(x, "conv2d input");
  check_4d(layer.weights, "conv2d weights");
  const int batch = x.dim(0), in_c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int out_c = layer.weights.dim(0), kh = layer.weights.dim(2), kw = layer.weights.dim(3);
  if (layer.weights.dim(1) != in_c)
    throw DimensionError("conv2d: input channels " + shape_str(x.shape()) +
                         " do not match weights " + shape_str(layer.weights.shape()));
  if (layer.bias.ndim() != 1 || layer.bias.dim(0) != out_c)
    throw DimensionError("conv2d: bias shape " + shape_str(layer.bias.shape()) +
                         " does not match weights " + shape_str(layer.weights.shape()));
  const int stride = layer.stride, pad = layer.padding;
  const int out_h = (h + 2 * pad - kh) / stride + 1;
  const int out_w = (w + 2 * pad - kw) / stride + 1;
  if (stride <= 0 || pad < 0 || h + 2 * pad < kh || w + 2 * pad < kw || out_h <= 0 || out_w <= 0)
    throw DimensionError("conv2d: kernel " + shape_str(layer.weights.shape()) +
                         " does not fit input " + shape_str(x.shape()));

  const int k = in_c * kh * kw;
  const int patch = out_h * out_w;
  Tensor y({batch, out_c, out_h, out_w});
  CMapRM wmat(layer.weights.data(), out_c, k);

  parallel_for(batch, [&](int b) {
    std::vector<double> cols(static_cast<std::size_t>(k) * patch);
    im2col(x.data() + static_cast<std::size_t>(b) * in_c * h * w, in_c, h, w, kh, kw,
           stride, pad, out_h, out_w, cols.data());
    MapRM yb(y.data() + static_cast<std::size_t>(b) * out_c * patch, out_c, patch);
    yb.noalias() = wmat * CMapRM(cols.data(), k, patch);
    for (int oc = 0; oc < out_c; ++oc) yb.row(oc).array() += layer.bias[static_cast<std::size_t>(oc)];
  });

  return {std::move(y), Conv2dCache{x, out_h, out_w}};
}

Conv2dGrads conv2d_backward(const Conv2d& layer, const Conv2dCache& cache, const Tensor& dy) {
  const Tensor& x = cache.input;
  const int batch = x.dim(0), in_c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int out_c = layer.weights.dim(0), kh = layer.weights.dim(2), kw = layer.weights.dim(3);
  const int out_h = cache.out_h, out_w = cache.out_w;
  const std::vector<int> want{batch, out_c, out_h, out_w};
  if (dy.shape() != want)
    throw DimensionError("conv2d backward: dy " + shape_str(dy.shape()) +
                         " does not match forward output " + shape_str(want));

  const int k = in_c * kh * kw;
  const int patch = out_h * out_w;
  CMapRM wmat(layer.weights.data(), out_c, k);

  Tensor dx(x.shape());
  // Per-sample weight/bias gradients, reduced in sample order afterwards so the
  // result is independent of the thread count.
  std::vector<std::vector<double>> dw_parts(static_cast<std::size_t>(batch));
  std::vector<std::vector<double>> db_parts(static_cast<std::size_t>(batch));

  parallel_for(batch, [&](int b) {
    std::vector<double> cols(static_cast<std::size_t>(k) * patch);
    im2col(x.data() + static_cast<std::size_t>(b) * in_c * h * w, in_c, h, w, kh, kw,
           layer.stride, layer.padding, out_h, out_w, cols.data());
    CMapRM dyb(dy.data() + static_cast<std::size_t>(b) * out_c * patch, out_c, patch);

    auto& dwb = dw_parts[static_cast<std::size_t>(b)];
    dwb.assign(static_cast<std::size_t>(out_c) * k, 0.0);
    MapRM(dwb.data(), out_c, k).noalias() = dyb * CMapRM(cols.data(), k, patch).transpose();

    auto& dbb = db_parts[static_cast<std::size_t>(b)];
    dbb.resize(static_cast<std::size_t>(out_c));
    for (int oc = 0; oc < out_c; ++oc) dbb[static_cast<std::size_t>(oc)] = dyb.row(oc).sum();

    std::vector<double> dcols(static_cast<std::size_t>(k) * patch);
    MapRM(dcols.data(), k, patch).noalias() = wmat.transpose() * dyb;
    col2im(dcols.data(), in_c, h, w, kh, kw, layer.stride, layer.padding, out_h, out_w,
           dx.data() + static_cast<std::size_t>(b) * in_c * h * w);
  });

  Tensor dw(layer.weights.shape());
  Tensor db(layer.bias.shape());
  for (int b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < dw.size(); ++i) dw[i] += dw_parts[static_cast<std::size_t>(b)][i];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += db_parts[static_cast<std::size_t>(b)][i];
  }
  return {std::move(dx), std::move(dw), std::move(db)};
}

std::pair<Tensor, Pool2Cache> maxpool2_forward(const Tensor& x) {
  check_4d(x, "maxpool2 input");
  const int batch = x.dim(0), ch = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0)
    throw DimensionError("maxpool2: spatial dims must be even, got " + shape_str(x.shape()));
  const int oh = h / 2, ow = w / 2;
  Tensor y({batch, ch, oh, ow});
  Pool2Cache cache;
  cache.input_shape = x.shape();
  cache.argmax.resize(y.size());

  std::size_t o = 0;
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < ch; ++c) {
      const std::size_t plane = (static_cast<std::size_t>(b) * ch + c) * h * w;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double best = -std::numeric_limits<double>::infinity();
          std::uint32_t best_i = 0;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dxp = 0; dxp < 2; ++dxp) {
              const std::size_t i = plane + static_cast<std::size_t>(2 * oy + dy) * w + 2 * ox + dxp;
              if (x[i] > best) {
                best = x[i];
                best_i = static_cast<std::uint32_t>(i);
              }
            }
          }
          y[o] = best;
          cache.argmax[o] = best_i;
          ++o;
        }
      }
    }
  }
  return {std::move(y), std::move(cache)};
}

Tensor maxpool2_backward(const Pool2Cache& cache, const Tensor& dy) {
  const auto& s = cache.input_shape;
  const std::vector<int> want{s[0], s[1], s[2] / 2, s[3] / 2};
  if (dy.shape() != want)
    throw DimensionError("maxpool2 backward: dy " + shape_str(dy.shape()) +
                         " does not match output " + shape_str(want));
  Tensor dx(s);
  for (std::size_t o = 0; o < dy.size(); ++o) dx[cache.argmax[o]] += dy[o];
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  y.array() = y.array().max(0.0);
  return y;
}

Tensor relu_backward(const Tensor& x_cache, const Tensor& dy) {
  require_same_shape(x_cache, dy, "relu backward");
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (x_cache[i] <= 0.0) dx[i] = 0.0;
  return dx;
}

std::pair<Tensor, FcCache> fc_forward(const Fc& layer, const Tensor& x) {
  if (x.ndim() != 2 || layer.weights.ndim() != 2 || x.dim(1) != layer.weights.dim(1))
    throw DimensionError("fc: input " + shape_str(x.shape()) + " does not match weights " +
                         shape_str(layer.weights.shape()));
  const int batch = x.dim(0), out = layer.weights.dim(0);
  if (layer.bias.ndim() != 1 || layer.bias.dim(0) != out)
    throw DimensionError("fc: bias shape " + shape_str(layer.bias.shape()));
  Tensor y({batch, out});
  y.mat().noalias() = x.mat() * layer.weights.mat().transpose();
  for (int b = 0; b < batch; ++b)
    for (int j = 0; j < out; ++j) y(b, j) += layer.bias[static_cast<std::size_t>(j)];
  return {std::move(y), FcCache{x}};
}

FcGrads fc_backward(const Fc& layer, const FcCache& cache, const Tensor& dy) {
  const Tensor& x = cache.input;
  const int batch = x.dim(0), out = layer.weights.dim(0);
  const std::vector<int> want{batch, out};
  if (dy.shape() != want)
    throw DimensionError("fc backward: dy " + shape_str(dy.shape()) + " expected " +
                         shape_str(want));
  FcGrads g{Tensor(x.shape()), Tensor(layer.weights.shape()), Tensor(layer.bias.shape())};
  g.dinput.mat().noalias() = dy.mat() * layer.weights.mat();
  g.dweights.mat().noalias() = dy.mat().transpose() * x.mat();
  for (int b = 0; b < batch; ++b)
    for (int j = 0; j < out; ++j) g.dbias[static_cast<std::size_t>(j)] += dy(b, j);
  return g;
}

std::pair<Tensor, DropoutCache> dropout_forward(const Dropout& layer, const Tensor& x,
                                                Mode mode, Rng& rng) {
  if (layer.p < 0.0 || layer.p >= 1.0)
    throw ConfigError("dropout: p must be in [0,1), got " + std::to_string(layer.p));
  if (mode == Mode::infer) return {x, DropoutCache{}};
  const double scale = 1.0 / (1.0 - layer.p);
  DropoutCache cache;
  cache.mask.resize(x.size());
  Tensor y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.next_double() >= layer.p ? scale : 0.0;
    cache.mask[i] = m;
    y[i] *= m;
  }
  return {std::move(y), std::move(cache)};
}

Tensor dropout_backward(const DropoutCache& cache, const Tensor& dy) {
  if (cache.mask.empty()) return dy;
  if (cache.mask.size() != dy.size())
    throw DimensionError("dropout backward: dy size " + std::to_string(dy.size()) +
                         " does not match mask size " + std::to_string(cache.mask.size()));
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= cache.mask[i];
  return dx;
}

namespace {

SoftmaxXent softmax_xent_impl(const Tensor& logits, const Tensor& targets, bool allow_masked) {
  if (logits.ndim() != 2 || !logits.same_shape(targets))
    throw DimensionError("cross entropy: logits " + shape_str(logits.shape()) +
                         " vs targets " + shape_str(targets.shape()));
  const int batch = logits.dim(0), classes = logits.dim(1);

  std::vector<bool> active(static_cast<std::size_t>(batch), true);
  int n_active = 0;
  for (int b = 0; b < batch; ++b) {
    double row_sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      const double v = targets(b, c);
      if (v != 0.0 && v != 1.0)
        throw ValidationError("cross entropy: target row " + std::to_string(b) +
                              " is not one-hot");
      row_sum += v;
    }
    if (row_sum == 1.0) {
      ++n_active;
    } else if (row_sum == 0.0 && allow_masked) {
      active[static_cast<std::size_t>(b)] = false;
    } else {
      throw ValidationError("cross entropy: target row " + std::to_string(b) +
                            " is not one-hot");
    }
  }

  SoftmaxXent out;
  out.probs = Tensor(logits.shape());
  out.dlogits = Tensor(logits.shape());
  if (n_active == 0) return out;

  const double inv_n = 1.0 / n_active;
  double total = 0.0;
  for (int b = 0; b < batch; ++b) {
    double mx = logits(b, 0);
    for (int c = 1; c < classes; ++c) mx = std::max(mx, logits(b, c));
    double z = 0.0;
    for (int c = 0; c < classes; ++c) z += std::exp(logits(b, c) - mx);
    const double log_z = mx + std::log(z);
    for (int c = 0; c < classes; ++c) {
      const double p = std::exp(logits(b, c) - log_z);
      out.probs(b, c) = p;
      if (active[static_cast<std::size_t>(b)]) {
        out.dlogits(b, c) = (p - targets(b, c)) * inv_n;
        if (targets(b, c) == 1.0) total += log_z - logits(b, c);
      }
    }
  }
  out.loss = total * inv_n;
  return out;
}

}  // namespace

SoftmaxXent softmax_cross_entropy(const Tensor& logits, const Tensor& targets) {
  return softmax_xent_impl(logits, targets, false);
}

SoftmaxXent softmax_cross_entropy_masked(const Tensor& logits, const Tensor& targets) {
  return softmax_xent_impl(logits, targets, true);
}

L2Penalty l2_penalty(const std::vector<const Tensor*>& weights, double lambda) {
  if (lambda < 0) throw ValidationError("l2_penalty: negative lambda");
  L2Penalty out;
  for (const Tensor* w : weights) {
    out.value += lambda * w->array().square().sum();
    out.grads.push_back(scaled(*w, 2.0 * lambda));
  }
  return out;
}

void SgdConfig::validate() const {
  if (batch_size <= 0) throw ConfigError("sgd: batch_size must be positive");
  if (epochs <= 0) throw ConfigError("sgd: epochs must be positive");
  if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("sgd: decay must be in (0,1)");
  if (!(lr_floor > 0.0 && lr_floor <= lr0)) throw ConfigError("sgd: need 0 < lr_floor <= lr0");
  if (decay_start_epoch < 0) throw ConfigError("sgd: decay_start_epoch must be >= 0");
}

double learning_rate(int epoch, const SgdConfig& cfg) {
  cfg.validate();
  if (epoch < 1) throw ValidationError("learning_rate: epoch is 1-based");
  if (epoch <= cfg.decay_start_epoch) return cfg.lr0;
  const double lr = cfg.lr0 * std::pow(cfg.decay, epoch - cfg.decay_start_epoch);
  return std::max(lr, cfg.lr_floor);
}

Tensor& NamedTensors::add(std::string name, Tensor t) {
  items.emplace_back(std::move(name), std::move(t));
  return items.back().second;
}

Tensor* NamedTensors::find(std::string_view name) {
  for (auto& [n, t] : items)
    if (n == name) return &t;
  return nullptr;
}

const Tensor* NamedTensors::find(std::string_view name) const {
  for (const auto& [n, t] : items)
    if (n == name) return &t;
  return nullptr;
}

Tensor& NamedTensors::at(std::string_view name) {
  if (Tensor* t = find(name)) return *t;
  throw ValidationError("unknown tensor \"" + std::string(name) + "\"");
}

const Tensor& NamedTensors::at(std::string_view name) const {
  if (const Tensor* t = find(name)) return *t;
  throw ValidationError("unknown tensor \"" + std::string(name) + "\"");
}

void sgd_step(NamedTensors& params, const NamedTensors& grads, double lr) {
  for (auto& [name, p] : params.items) {
    const Tensor* g = grads.find(name);
    if (!g) throw ValidationError("sgd_step: missing gradient for \"" + name + "\"");
    if (!p.same_shape(*g))
      throw DimensionError("sgd_step: gradient shape " + shape_str(g->shape()) +
                           " does not match parameter \"" + name + "\" " +
                           shape_str(p.shape()));
    p.array() -= lr * g->array();
  }
}

}  // namespace adnet::nn
