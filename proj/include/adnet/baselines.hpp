#pragma once

#include <cstdint>
#include <vector>

#include "adnet/tensor.hpp"
#include "adnet/vision.hpp"

namespace adnet::baselines {

struct HogConfig {
  int cell = 8;           // px per cell side
  int bins = 9;           // unsigned orientations over [0, 180)
  int block = 2;          // cells per block side
  int block_stride = 1;   // cells
  double eps = 1e-6;      // L2 norm: v / sqrt(|v|^2 + eps^2)
};

/// Gradients are central differences with replicated borders; votes use
/// magnitude-weighted linear interpolation between bin centers at
/// (k + 0.5)*180/bins degrees, wrapping mod 180. Feature layout: blocks in
/// row-major order, cells row-major within a block, then bins.
std::vector<double> hog(const Tensor& gray, const HogConfig& cfg);

/// All conventions frozen: 8 neighbors of the 3x3 ring ordered top-left then
/// clockwise, first neighbor in the most significant bit, neighbor >= center
/// sets the bit; 256-bin histogram over interior pixels, L1-normalized.
struct LbpConfig {};

std::vector<double> lbp_histogram(const Tensor& gray, const LbpConfig& cfg = {});

enum class FeatureKind { hog, lbp };

/// Per selected keyframe: crop -> luma -> resize to cfg.side, extract, then
/// average the per-frame vectors element-wise.
std::vector<double> frames_baseline_features(const std::vector<vision::Frame>& frames,
                                             FeatureKind kind, const HogConfig& hog_cfg,
                                             const vision::VisualConfig& vis_cfg);

struct LinearSvm {
  Tensor w;  // [d]
  double b = 0;
  double lambda_svm = 1e-4;
  int epochs = 20;
};

struct SvmTrainResult {
  LinearSvm model;                      // averaged Pegasos iterate
  std::vector<double> objective_curve;  // objective at each epoch end, averaged iterate
  bool single_class_data = false;
};

struct SvmPrediction {
  int label = 1;  // +1 or -1; ties go to +1
  double margin = 0;
};

/// Pegasos: stochastic sub-gradient on (lambda/2)|w|^2 + (1/N) sum hinge,
/// step 1/(lambda*t), bias unregularized; returns the running average of the
/// iterates. Sample picks come from the given seed.
SvmTrainResult svm_train(const Tensor& x, const std::vector<int>& y, double lambda_svm,
                         int epochs, std::uint64_t seed);

SvmPrediction svm_predict(const LinearSvm& m, const std::vector<double>& x);

double svm_objective(const Tensor& x, const std::vector<int>& y, const Tensor& w, double b,
                     double lambda_svm);

}  // namespace adnet::baselines
