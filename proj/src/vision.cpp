#include "adnet/vision.hpp"

#include <algorithm>

#include "adnet/signal.hpp"

namespace adnet::vision {

std::vector<int> keyframe_indices(int total_frames, int k) {
  if (total_frames < 1) throw ValidationError("keyframes: no frames");
  if (k < 1) throw ValidationError("keyframes: K must be positive");
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    // floor((i + 0.5) * T / K) == ((2i+1)*T) / (2K) exactly
    const long long num = (2LL * i + 1) * total_frames;
    idx[static_cast<std::size_t>(i)] = static_cast<int>(num / (2LL * k));
  }
  return idx;
}

std::vector<Frame> select_keyframes(const std::vector<Frame>& frames, int k) {
  const auto idx = keyframe_indices(static_cast<int>(frames.size()), k);
  std::vector<Frame> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(frames[static_cast<std::size_t>(i)]);
  return out;
}

Frame center_crop_square(const Frame& f) {
  if (!f.valid()) throw ValidationError("center_crop: invalid frame");
  const int side = std::min(f.height, f.width);
  if (side == f.height && side == f.width) return f;
  const int oy = (f.height - side) / 2;
  const int ox = (f.width - side) / 2;
  Frame out;
  out.height = side;
  out.width = side;
  out.data.resize(static_cast<std::size_t>(side) * side * 3);
  for (int y = 0; y < side; ++y) {
    const auto* src = f.data.data() + (static_cast<std::size_t>(y + oy) * f.width + ox) * 3;
    std::copy_n(src, static_cast<std::size_t>(side) * 3, out.data.data() + static_cast<std::size_t>(y) * side * 3);
  }
  return out;
}

Tensor to_gray(const Frame& f) {
  if (!f.valid()) throw ValidationError("to_gray: invalid frame");
  Tensor g({f.height, f.width});
  const std::uint8_t* p = f.data.data();
  for (std::size_t i = 0; i < g.size(); ++i, p += 3)
    g[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  return g;
}

Tensor gray_input(const Frame& f, int side) {
  return signal::resize_bilinear_2d(to_gray(center_crop_square(f)), side, side);
}

Tensor make_visual_input(const std::vector<Frame>& frames, const VisualConfig& cfg) {
  if (cfg.side % 8 != 0)
    throw ConfigError("visual config: side must be divisible by 8, got " +
                      std::to_string(cfg.side));
  const auto keys = select_keyframes(frames, cfg.keyframes);
  const int s = cfg.side;
  Tensor out({3 * cfg.keyframes, s, s});
  for (int kf = 0; kf < cfg.keyframes; ++kf) {
    const Frame cropped = center_crop_square(keys[static_cast<std::size_t>(kf)]);
    for (int ch = 0; ch < 3; ++ch) {
      Tensor src({cropped.height, cropped.width});
      const std::uint8_t* p = cropped.data.data() + ch;
      for (std::size_t i = 0; i < src.size(); ++i, p += 3) src[i] = *p;
      const Tensor resized = signal::resize_bilinear_2d(src, s, s);
      double* dst = out.data() + static_cast<std::size_t>(3 * kf + ch) * s * s;
      for (std::size_t i = 0; i < resized.size(); ++i) dst[i] = resized[i] / 255.0 - 0.5;
    }
  }
  return out;
}

}  // namespace adnet::vision
