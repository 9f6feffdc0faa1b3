#include "adnet/baselines.hpp"

#include <cmath>
#include <cstdio>

namespace adnet::baselines {

std::vector<double> hog(const Tensor& gray, const HogConfig& cfg) {
  if (gray.ndim() != 2) throw DimensionError("hog: expected 2-D map, got " + shape_str(gray.shape()));
  const int h = gray.dim(0), w = gray.dim(1);
  if (h != w || h % cfg.cell != 0)
    throw ConfigError("hog: image side must be square and divisible by cell size " +
                      std::to_string(cfg.cell) + ", got " + shape_str(gray.shape()));

  const int cells = h / cfg.cell;
  const double bin_width = 180.0 / cfg.bins;
  std::vector<double> hist(static_cast<std::size_t>(cells) * cells * cfg.bins, 0.0);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = gray(y, std::min(x + 1, w - 1)) - gray(y, std::max(x - 1, 0));
      const double gy = gray(std::min(y + 1, h - 1), x) - gray(std::max(y - 1, 0), x);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      double ang = std::atan2(gy, gx) * 180.0 / M_PI;  // (-180, 180]
      if (ang < 0) ang += 180.0;
      if (ang >= 180.0) ang -= 180.0;
      // split vote between the two nearest bin centers, wrapping mod 180
      const double pos = ang / bin_width - 0.5;
      const int lo = static_cast<int>(std::floor(pos));
      const double frac = pos - lo;
      const int b0 = ((lo % cfg.bins) + cfg.bins) % cfg.bins;
      const int b1 = (b0 + 1) % cfg.bins;
      const std::size_t cell_base =
          (static_cast<std::size_t>(y / cfg.cell) * cells + x / cfg.cell) * cfg.bins;
      hist[cell_base + static_cast<std::size_t>(b0)] += mag * (1.0 - frac);
      hist[cell_base + static_cast<std::size_t>(b1)] += mag * frac;
    }
  }

  const int nblocks = cells - cfg.block + 1;
  const int block_len = cfg.block * cfg.block * cfg.bins;
  std::vector<double> feat;
  feat.reserve(static_cast<std::size_t>(nblocks) * nblocks * block_len);
  for (int by = 0; by < nblocks; by += cfg.block_stride) {
    for (int bx = 0; bx < nblocks; bx += cfg.block_stride) {
      const std::size_t start = feat.size();
      double norm_sq = 0.0;
      for (int cy = 0; cy < cfg.block; ++cy) {
        for (int cx = 0; cx < cfg.block; ++cx) {
          const std::size_t base =
              (static_cast<std::size_t>(by + cy) * cells + bx + cx) * cfg.bins;
          for (int k = 0; k < cfg.bins; ++k) {
            const double v = hist[base + static_cast<std::size_t>(k)];
            feat.push_back(v);
            norm_sq += v * v;
          }
        }
      }
      const double inv = 1.0 / std::sqrt(norm_sq + cfg.eps * cfg.eps);
      for (std::size_t i = start; i < feat.size(); ++i) feat[i] *= inv;
    }
  }
  return feat;
}

std::vector<double> lbp_histogram(const Tensor& gray, const LbpConfig&) {
  if (gray.ndim() != 2) throw DimensionError("lbp: expected 2-D map, got " + shape_str(gray.shape()));
  const int h = gray.dim(0), w = gray.dim(1);
  if (h < 3 || w < 3)
    throw ValidationError("lbp: image must be at least 3x3, got " + shape_str(gray.shape()));

  // top-left, then clockwise
  static constexpr int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  static constexpr int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};

  std::vector<double> hist(256, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double c = gray(y, x);
      unsigned code = 0;
      for (int k = 0; k < 8; ++k) {
        code <<= 1;
        if (gray(y + dy[k], x + dx[k]) >= c) code |= 1u;
      }
      hist[code] += 1.0;
    }
  }
  const double total = static_cast<double>(h - 2) * (w - 2);
  for (auto& v : hist) v /= total;
  return hist;
}

std::vector<double> frames_baseline_features(const std::vector<vision::Frame>& frames,
                                             FeatureKind kind, const HogConfig& hog_cfg,
                                             const vision::VisualConfig& vis_cfg) {
  if (frames.empty()) throw ValidationError("baseline features: no frames");
  const auto keys = vision::select_keyframes(frames, vis_cfg.keyframes);
  std::vector<double> acc;
  for (const auto& f : keys) {
    const Tensor gray = vision::gray_input(f, vis_cfg.side);
    std::vector<double> v =
        kind == FeatureKind::hog ? hog(gray, hog_cfg) : lbp_histogram(gray);
    if (acc.empty())
      acc = std::move(v);
    else
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(keys.size());
  for (auto& v : acc) v *= inv;
  return acc;
}

double svm_objective(const Tensor& x, const std::vector<int>& y, const Tensor& w, double b,
                     double lambda_svm) {
  const int n = x.dim(0), d = x.dim(1);
  double hinge = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = b;
    for (int j = 0; j < d; ++j) s += w[static_cast<std::size_t>(j)] * x(i, j);
    hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * s);
  }
  double wsq = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) wsq += w[j] * w[j];
  return 0.5 * lambda_svm * wsq + hinge / n;
}

SvmTrainResult svm_train(const Tensor& x, const std::vector<int>& y, double lambda_svm,
                         int epochs, std::uint64_t seed) {
  if (x.ndim() != 2) throw DimensionError("svm_train: X must be 2-D, got " + shape_str(x.shape()));
  const int n = x.dim(0), d = x.dim(1);
  if (n < 1 || static_cast<std::size_t>(n) != y.size())
    throw ValidationError("svm_train: need one label per row");
  for (int v : y)
    if (v != 1 && v != -1) throw ValidationError("svm_train: labels must be +1/-1");
  if (lambda_svm <= 0) throw ValidationError("svm_train: lambda must be positive");

  SvmTrainResult out;
  out.single_class_data =
      std::all_of(y.begin(), y.end(), [&](int v) { return v == y[0]; });
  if (out.single_class_data)
    std::fprintf(stderr, "warning: svm_train called with single-class data\n");

  Rng rng(seed);
  Tensor w({d});
  double b = 0.0;
  Tensor w_avg({d});
  double b_avg = 0.0;
  long t = 0;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (int step = 0; step < n; ++step) {
      ++t;
      const auto i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      const double eta = 1.0 / (lambda_svm * static_cast<double>(t));
      double s = b;
      for (int j = 0; j < d; ++j) s += w[static_cast<std::size_t>(j)] * x(i, j);
      const double margin = y[static_cast<std::size_t>(i)] * s;
      const double shrink = 1.0 - eta * lambda_svm;  // == 1 - 1/t
      for (std::size_t j = 0; j < w.size(); ++j) w[j] *= shrink;
      if (margin < 1.0) {
        const double c = eta * y[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)] += c * x(i, j);
        b += c;
      }
      for (std::size_t j = 0; j < w.size(); ++j) w_avg[j] += w[j];
      b_avg += b;
    }
    const double inv_t = 1.0 / static_cast<double>(t);
    Tensor wa = scaled(w_avg, inv_t);
    out.objective_curve.push_back(svm_objective(x, y, wa, b_avg * inv_t, lambda_svm));
  }

  const double inv_t = 1.0 / static_cast<double>(t);
  out.model.w = scaled(w_avg, inv_t);
  out.model.b = b_avg * inv_t;
  out.model.lambda_svm = lambda_svm;
  out.model.epochs = epochs;
  return out;
}

SvmPrediction svm_predict(const LinearSvm& m, const std::vector<double>& x) {
  if (x.size() != m.w.size())
    throw DimensionError("svm_predict: feature dim " + std::to_string(x.size()) +
                         " does not match model dim " + std::to_string(m.w.size()));
  double s = m.b;
  for (std::size_t j = 0; j < x.size(); ++j) s += m.w[j] * x[j];
  return {s >= 0.0 ? 1 : -1, s};
}

}  // namespace adnet::baselines
