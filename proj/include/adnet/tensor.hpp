#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "adnet/error.hpp"

namespace adnet {

inline std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

/// Dense n-dimensional array, flat row-major storage. `Tensor` (double) is the
/// numeric currency of every module; float instantiation exists for the model
/// file format only.
template <class Scalar>
class TensorT {
public:
  using MatrixRM =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  TensorT() = default;

  explicit TensorT(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(checked_size(shape_), Scalar(0));
  }

  static TensorT zeros(std::vector<int> shape) { return TensorT(std::move(shape)); }

  static TensorT full(std::vector<int> shape, Scalar v) {
    TensorT t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  static TensorT from(std::vector<int> shape, std::vector<Scalar> values) {
    TensorT t;
    t.shape_ = std::move(shape);
    if (values.size() != checked_size(t.shape_))
      throw DimensionError("tensor data length " + std::to_string(values.size()) +
                           " does not match shape " + shape_str(t.shape_));
    t.data_ = std::move(values);
    return t;
  }

  static TensorT identity(int n) {
    TensorT t({n, n});
    for (int i = 0; i < n; ++i) t.data_[static_cast<std::size_t>(i) * n + i] = Scalar(1);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return data_.size(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::vector<Scalar>& raw() { return data_; }
  const std::vector<Scalar>& raw() const { return data_; }

  Scalar& operator[](std::size_t flat) { return data_[flat]; }
  Scalar operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  Scalar& operator()(I... idx) {
    return data_[flat_index(idx...)];
  }
  template <class... I>
  Scalar operator()(I... idx) const {
    return data_[flat_index(idx...)];
  }

  bool same_shape(const TensorT& o) const { return shape_ == o.shape_; }

  TensorT reshaped(std::vector<int> ns) const {
    if (checked_size(ns) != data_.size())
      throw DimensionError("cannot reshape " + shape_str(shape_) + " to " + shape_str(ns));
    TensorT t = *this;
    t.shape_ = std::move(ns);
    return t;
  }

  bool all_finite() const {
    for (Scalar v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  /// 2-D Eigen view over the flat data (row-major); rows*cols must equal size().
  Eigen::Map<MatrixRM> mat(int rows, int cols) {
    view_check(rows, cols);
    return Eigen::Map<MatrixRM>(data_.data(), rows, cols);
  }
  Eigen::Map<const MatrixRM> mat(int rows, int cols) const {
    view_check(rows, cols);
    return Eigen::Map<const MatrixRM>(data_.data(), rows, cols);
  }
  Eigen::Map<MatrixRM> mat() { return mat(dim2(0), dim2(1)); }
  Eigen::Map<const MatrixRM> mat() const { return mat(dim2(0), dim2(1)); }

  Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>> array() {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }
  Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>> array() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

private:
  static std::size_t checked_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw DimensionError("non-positive dimension in shape " + shape_str(shape));
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }

  int dim2(int i) const {
    if (ndim() != 2) throw DimensionError("expected 2-D tensor, got " + shape_str(shape_));
    return shape_[static_cast<std::size_t>(i)];
  }

  void view_check(int rows, int cols) const {
    if (rows <= 0 || cols <= 0 ||
        static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != data_.size())
      throw DimensionError("view " + std::to_string(rows) + "x" + std::to_string(cols) +
                           " incompatible with tensor " + shape_str(shape_));
  }

  template <class... I>
  std::size_t flat_index(I... idx) const {
    const std::array<long long, sizeof...(I)> ix{static_cast<long long>(idx)...};
    std::size_t flat = 0;
    for (std::size_t k = 0; k < ix.size(); ++k)
      flat = flat * static_cast<std::size_t>(shape_[k]) + static_cast<std::size_t>(ix[k]);
    return flat;
  }

  std::vector<int> shape_;
  std::vector<Scalar> data_;
};

using Tensor = TensorT<double>;
using TensorF = TensorT<float>;

template <class Scalar>
void require_same_shape(const TensorT<Scalar>& a, const TensorT<Scalar>& b,
                        const char* op) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
}

template <class Scalar>
TensorT<Scalar> add(const TensorT<Scalar>& a, const TensorT<Scalar>& b) {
  require_same_shape(a, b, "add");
  TensorT<Scalar> c = a;
  c.array() += b.array();
  return c;
}

template <class Scalar>
TensorT<Scalar> sub(const TensorT<Scalar>& a, const TensorT<Scalar>& b) {
  require_same_shape(a, b, "sub");
  TensorT<Scalar> c = a;
  c.array() -= b.array();
  return c;
}

template <class Scalar>
TensorT<Scalar> mul(const TensorT<Scalar>& a, const TensorT<Scalar>& b) {
  require_same_shape(a, b, "mul");
  TensorT<Scalar> c = a;
  c.array() *= b.array();
  return c;
}

template <class Scalar>
TensorT<Scalar> operator+(const TensorT<Scalar>& a, const TensorT<Scalar>& b) { return add(a, b); }
template <class Scalar>
TensorT<Scalar> operator-(const TensorT<Scalar>& a, const TensorT<Scalar>& b) { return sub(a, b); }
template <class Scalar>
TensorT<Scalar> operator*(const TensorT<Scalar>& a, const TensorT<Scalar>& b) { return mul(a, b); }

template <class Scalar>
TensorT<Scalar> scaled(const TensorT<Scalar>& a, Scalar s) {
  TensorT<Scalar> c = a;
  c.array() *= s;
  return c;
}

/// c[i,j] = sum_k a[i,k] * b[k,j]; Eigen GEMM underneath.
template <class Scalar>
TensorT<Scalar> matmul(const TensorT<Scalar>& a, const TensorT<Scalar>& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
    throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
  TensorT<Scalar> c({a.dim(0), b.dim(1)});
  c.mat().noalias() = a.mat() * b.mat();
  return c;
}

template <class Scalar>
Scalar sum(const TensorT<Scalar>& a) {
  return a.array().sum();
}

/// Deterministic 64-bit PRNG, frozen for the whole artifact:
/// xoshiro256++ (Blackman & Vigna), state seeded by four successive
/// splitmix64 outputs of the user seed. Identical seed -> identical stream
/// on every platform. Normal draws use Box-Muller on two fresh uniforms
/// (no spare caching); bounded integers use the 128-bit multiply-shift map.
class Rng {
public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0,1]; used where log() must not see zero.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double next_normal(double mean, double std) {
    const double u1 = next_double_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + std * r * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, n); Lemire multiply-shift (bias < 2^-64, frozen).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Derived stream: independent generator for a named purpose.
  Rng derive(std::uint64_t salt) const {
    std::uint64_t x = s_[0] ^ (salt * 0x9e3779b97f4a7c15ULL);
    Rng r(0);
    for (auto& w : r.s_) w = splitmix64(x);
    return r;
  }

  /// Seeded Fisher-Yates; the frozen shuffle used everywhere.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// I.i.d. Gaussian tensor; draws consumed in flat row-major order.
inline Tensor rng_normal(Rng& rng, std::vector<int> shape, double mean, double std) {
  if (std < 0) throw ValidationError("rng_normal: negative std");
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.next_normal(mean, std);
  return t;
}

}  // namespace adnet
