#include "adnet/signal.hpp"

#include <algorithm>
#include <cmath>

namespace adnet::signal {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!power_of_two(static_cast<int>(n)))
    throw ConfigError("fft: size " + std::to_string(n) + " is not a power of two");

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
  }
}

AudioClip resample_linear(const AudioClip& clip, double target_rate, int target_len) {
  if (clip.samples.empty()) throw ValidationError("resample: empty clip");
  if (clip.sample_rate <= 0) throw ValidationError("resample: non-positive sample rate");
  if (target_rate <= 0 || target_len <= 0)
    throw ValidationError("resample: target rate and length must be positive");

  const std::size_t n = clip.samples.size();
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<std::size_t>(target_len));
  const double step = clip.sample_rate / target_rate;  // source samples per output sample
  for (int i = 0; i < target_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 >= n - 1) {
      out.samples[static_cast<std::size_t>(i)] = (pos <= static_cast<double>(n - 1))
                                                     ? clip.samples[n - 1]
                                                     : 0.0;
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out.samples[static_cast<std::size_t>(i)] =
        clip.samples[i0] * (1.0 - frac) + clip.samples[i0 + 1] * frac;
  }
  return out;
}

Tensor stft_magnitude(const AudioClip& clip, const SpectrogramConfig& cfg) {
  if (!power_of_two(cfg.window_size))
    throw ConfigError("stft: window_size " + std::to_string(cfg.window_size) +
                      " is not a power of two");
  if (cfg.hop <= 0 || cfg.hop > cfg.window_size)
    throw ConfigError("stft: need 0 < hop <= window_size");
  const int n = static_cast<int>(clip.samples.size());
  const int win = cfg.window_size;
  if (n < win)
    throw ValidationError("stft: clip of " + std::to_string(n) +
                          " samples is shorter than the window (" + std::to_string(win) + ")");

  const int bins = win / 2 + 1;
  const int frames = (n - win) / cfg.hop + 1;

  std::vector<double> hann(static_cast<std::size_t>(win));
  for (int i = 0; i < win; ++i)
    hann[static_cast<std::size_t>(i)] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / win));

  Tensor mag({bins, frames});
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(win));
  for (int f = 0; f < frames; ++f) {
    const int off = f * cfg.hop;
    for (int i = 0; i < win; ++i)
      buf[static_cast<std::size_t>(i)] = clip.samples[static_cast<std::size_t>(off + i)] *
                                         hann[static_cast<std::size_t>(i)];
    fft_radix2(buf, false);
    for (int k = 0; k < bins; ++k) mag(k, f) = std::abs(buf[static_cast<std::size_t>(k)]);
  }
  return mag;
}

Tensor log_spectrogram(const Tensor& mag) {
  Tensor out(mag.shape());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    const double v = std::log1p(mag[i]);
    out[i] = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return Tensor(mag.shape());  // constant map -> zeros
  const double inv = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - lo) * inv;
  return out;
}

Tensor resize_bilinear_2d(const Tensor& x, int out_h, int out_w) {
  if (x.ndim() != 2) throw DimensionError("resize: expected 2-D map, got " + shape_str(x.shape()));
  if (out_h <= 0 || out_w <= 0) throw ValidationError("resize: non-positive output size");
  const int h = x.dim(0), w = x.dim(1);
  const double sy = out_h > 1 ? static_cast<double>(h - 1) / (out_h - 1) : 0.0;
  const double sx = out_w > 1 ? static_cast<double>(w - 1) / (out_w - 1) : 0.0;
  Tensor out({out_h, out_w});
  for (int oy = 0; oy < out_h; ++oy) {
    const double fy = oy * sy;
    const int y0 = std::min(static_cast<int>(fy), h - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int ox = 0; ox < out_w; ++ox) {
      const double fx = ox * sx;
      const int x0 = std::min(static_cast<int>(fx), w - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      const double top = x(y0, x0) * (1.0 - tx) + x(y0, x1) * tx;
      const double bot = x(y1, x0) * (1.0 - tx) + x(y1, x1) * tx;
      out(oy, ox) = top * (1.0 - ty) + bot * ty;
    }
  }
  return out;
}

Tensor make_audio_input(const AudioClip& clip, const SpectrogramConfig& cfg) {
  const int total = static_cast<int>(std::llround(cfg.target_duration_s * cfg.target_sample_rate));
  if (total < cfg.window_size)
    throw ConfigError("make_audio_input: canonical duration shorter than the STFT window");

  // natural-length resample, then center pad/crop to the canonical duration
  const double duration = static_cast<double>(clip.samples.size()) / clip.sample_rate;
  const int natural = std::max(1, static_cast<int>(std::llround(duration * cfg.target_sample_rate)));
  AudioClip r = resample_linear(clip, cfg.target_sample_rate, natural);

  std::vector<double> canon(static_cast<std::size_t>(total), 0.0);
  if (natural >= total) {
    const int start = (natural - total) / 2;
    std::copy_n(r.samples.begin() + start, total, canon.begin());
  } else {
    const int off = (total - natural) / 2;
    std::copy(r.samples.begin(), r.samples.end(), canon.begin() + off);
  }
  r.samples = std::move(canon);

  const Tensor norm = log_spectrogram(stft_magnitude(r, cfg));
  const int s = cfg.output_side;
  return resize_bilinear_2d(norm, s, s).reshaped({1, s, s});
}

}  // namespace adnet::signal
