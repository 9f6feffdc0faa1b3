#pragma once

#include <complex>
#include <vector>

#include "adnet/tensor.hpp"

namespace adnet::signal {

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1]
  double sample_rate = 0;      // Hz
};

struct SpectrogramConfig {
  int window_size = 512;  // must be a power of two (radix-2 FFT)
  int hop = 256;
  double target_duration_s = 4.0;
  double target_sample_rate = 16000.0;
  int output_side = 112;
};

/// In-place radix-2 Cooley-Tukey FFT (decimation in time, bit-reversal
/// reorder). inverse=true applies the conjugate transform and divides by N.
/// The size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

/// Source sampled at absolute times i/target_rate by linear interpolation;
/// times past the clip's end give zero.
AudioClip resample_linear(const AudioClip& clip, double target_rate, int target_len);

/// Hann-windowed (periodic: w[n] = 0.5*(1 - cos(2*pi*n/N))) magnitude STFT.
/// Output is [window_size/2 + 1 x floor((len - window)/hop) + 1].
Tensor stft_magnitude(const AudioClip& clip, const SpectrogramConfig& cfg);

/// log(1 + mag), then min-max normalized to [0,1] over the whole map;
/// a constant input maps to all zeros.
Tensor log_spectrogram(const Tensor& mag);

/// Corner-aligned bilinear resize of a 2-D map: source coordinate of output
/// index i is i*(in-1)/(out-1) (0 when out == 1).
Tensor resize_bilinear_2d(const Tensor& x, int out_h, int out_w);

/// Full audio branch input: resample to the target rate, center-pad/crop the
/// sample buffer to target_duration_s, STFT, log-normalize, resize to
/// [1 x S x S] with S = cfg.output_side.
Tensor make_audio_input(const AudioClip& clip, const SpectrogramConfig& cfg);

}  // namespace adnet::signal
