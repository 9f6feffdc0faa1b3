#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adnet/tensor.hpp"

namespace adnet::nn {

enum class Mode { train, infer };

// ---------------------------------------------------------------- layers

/// Convolution is cross-correlation (no kernel flip), zero padding.
struct Conv2d {
  Tensor weights;  // [outC, inC, kH, kW]
  Tensor bias;     // [outC]
  int stride = 1;
  int padding = 0;
};

struct Conv2dCache {
  Tensor input;  // [B, inC, H, W]
  int out_h = 0, out_w = 0;
};

struct Conv2dGrads {
  Tensor dinput, dweights, dbias;
};

std::pair<Tensor, Conv2dCache> conv2d_forward(const Conv2d& layer, const Tensor& x);
Conv2dGrads conv2d_backward(const Conv2d& layer, const Conv2dCache& cache, const Tensor& dy);

/// 2x2 non-overlapping max pool; ties go to the first element in row-major
/// scan order so gradients are deterministic.
struct Pool2Cache {
  std::vector<int> input_shape;
  std::vector<std::uint32_t> argmax;  // flat index into the input per output cell
};

std::pair<Tensor, Pool2Cache> maxpool2_forward(const Tensor& x);
Tensor maxpool2_backward(const Pool2Cache& cache, const Tensor& dy);

/// ReLU; the forward input is the backward cache.
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x_cache, const Tensor& dy);

struct Fc {
  Tensor weights;  // [out, in]
  Tensor bias;     // [out]
};

struct FcCache {
  Tensor input;  // [B, in]
};

struct FcGrads {
  Tensor dinput, dweights, dbias;
};

/// y = x * W^T + b
std::pair<Tensor, FcCache> fc_forward(const Fc& layer, const Tensor& x);
FcGrads fc_backward(const Fc& layer, const FcCache& cache, const Tensor& dy);

/// Inverted dropout: kept units are scaled by 1/(1-p) at train time, so
/// inference is the identity map. Train mode consumes one uniform draw per
/// element in flat order, even when p == 0.
struct Dropout {
  double p = 0.5;
};

struct DropoutCache {
  std::vector<double> mask;  // scale factors; empty means identity (infer mode)
};

std::pair<Tensor, DropoutCache> dropout_forward(const Dropout& layer, const Tensor& x,
                                                Mode mode, Rng& rng);
Tensor dropout_backward(const DropoutCache& cache, const Tensor& dy);

// ---------------------------------------------------------------- losses

struct SoftmaxXent {
  double loss = 0;
  Tensor dlogits;
  Tensor probs;
};

/// loss = -(1/B) sum_i sum_c y_ic log softmax(logits)_ic, max-subtraction
/// stabilized; dlogits = (softmax - y)/B. Every target row must be one-hot.
SoftmaxXent softmax_cross_entropy(const Tensor& logits, const Tensor& targets);

/// Same, but all-zero target rows are masked out and the mean runs over the
/// remaining rows (used by the category head, where regular shots carry no
/// category).
SoftmaxXent softmax_cross_entropy_masked(const Tensor& logits, const Tensor& targets);

struct L2Penalty {
  double value = 0;
  std::vector<Tensor> grads;  // 2*lambda*W per listed tensor
};

L2Penalty l2_penalty(const std::vector<const Tensor*>& weights, double lambda);

// ---------------------------------------------------------------- optimizer

struct SgdConfig {
  int batch_size = 200;
  int epochs = 100;
  double lr0 = 0.001;
  double decay = 0.95;
  int decay_start_epoch = 50;
  double lr_floor = 0.00001;

  void validate() const;
};

/// lr0 through decay_start_epoch, then lr0*decay^(epoch-start) floored at
/// lr_floor. Epochs are 1-based.
double learning_rate(int epoch, const SgdConfig& cfg);

/// Ordered collection of named tensors; insertion order is the canonical
/// (and serialized) parameter order.
struct NamedTensors {
  std::vector<std::pair<std::string, Tensor>> items;

  Tensor& add(std::string name, Tensor t);
  Tensor* find(std::string_view name);
  const Tensor* find(std::string_view name) const;
  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;
};

/// p <- p - lr*g for every parameter; every parameter must have a gradient
/// of matching shape.
void sgd_step(NamedTensors& params, const NamedTensors& grads, double lr);

}  // namespace adnet::nn
