#pragma once

#include <cstdint>
#include <vector>

#include "adnet/tensor.hpp"

namespace adnet::vision {

/// 8-bit RGB frame, interleaved row-major.
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // H*W*3

  bool valid() const {
    return height >= 1 && width >= 1 &&
           data.size() == static_cast<std::size_t>(height) * width * 3;
  }
};

struct VisualConfig {
  int keyframes = 3;  // K
  int side = 112;     // S, divisible by 8 (three 2x pools)
};

/// K indices floor((i+0.5)*T/K), computed in exact integer arithmetic; for
/// T < K the formula itself repeats trailing frames.
std::vector<int> keyframe_indices(int total_frames, int k);

std::vector<Frame> select_keyframes(const std::vector<Frame>& frames, int k);

/// Square crop of side min(H,W), centered (offset floor((max-min)/2)).
Frame center_crop_square(const Frame& f);

/// ITU-R 601 luma (0.299/0.587/0.114) as a double map in [0,255].
Tensor to_gray(const Frame& f);

/// Network-sized grayscale map: crop -> luma -> bilinear resize to side x side.
Tensor gray_input(const Frame& f, int side);

/// Per keyframe: center crop -> bilinear resize to SxS -> u8/255 - 0.5;
/// keyframes stacked along channels (frame-major, RGB within) -> [3K x S x S].
Tensor make_visual_input(const std::vector<Frame>& frames, const VisualConfig& cfg);

}  // namespace adnet::vision
