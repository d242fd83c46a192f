// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/signal/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "remixsep/signal/fft.h"

namespace remixsep {

std::vector<double> MakeWindow(WindowType type, int n_fft) {
  std::vector<double> w(n_fft);
  switch (type) {
    case WindowType::kHannPeriodic:
      for (int n = 0; n < n_fft; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / n_fft);
      break;
  }
  return w;
}

bool SatisfiesOverlapAdd(WindowType type, int n_fft, int hop) {
  if (hop <= 0 || hop > n_fft) return false;
  std::vector<double> w = MakeWindow(type, n_fft);
  double lo = INFINITY, hi = -INFINITY;
  for (int n = 0; n < hop; ++n) {
    double acc = 0.0;
    for (int k = n; k < n_fft; k += hop) acc += w[k] * w[k];
    lo = std::min(lo, acc);
    hi = std::max(hi, acc);
  }
  return lo > 0.0 && (hi - lo) <= 1e-10 * hi;
}

Spectrogram Stft(const Waveform& w, int n_fft, int hop) {
  if (w.Empty()) throw std::invalid_argument("Stft: empty waveform");
  if (!IsPowerOfTwo(n_fft) || n_fft < 2)
    throw std::invalid_argument("Stft: n_fft must be a power of two");
  if (hop <= 0 || hop > n_fft)
    throw std::invalid_argument("Stft: hop must satisfy 0 < hop <= n_fft");
  if (w.Length() < n_fft)
    throw std::invalid_argument("Stft: waveform shorter than n_fft");

  const int64_t length = w.Length();
  const int pad = n_fft / 2;
  const int num_frames = static_cast<int>(1 + length / hop);

  StftParams params;
  params.n_fft = n_fft;
  params.hop = hop;
  params.window = WindowType::kHannPeriodic;
  params.sample_rate = w.SampleRate();
  params.signal_length = length;
  Spectrogram out(w.NumChannels(), num_frames, params);

  const std::vector<double> window = MakeWindow(params.window, n_fft);
  RealFft fft(n_fft);
  std::vector<double> padded(length + 2 * pad);
  std::vector<double> frame(n_fft);
  std::vector<cplx> bins(fft.NumBins());

  for (int c = 0; c < w.NumChannels(); ++c) {
    auto x = w.Channel(c);
    // Reflect without repeating the edge sample.
    for (int64_t i = 0; i < static_cast<int64_t>(padded.size()); ++i) {
      int64_t j = i - pad;
      if (j < 0) j = -j;
      if (j >= length) j = 2 * (length - 1) - j;
      padded[i] = x[j];
    }
    for (int t = 0; t < num_frames; ++t) {
      const double* src = padded.data() + static_cast<int64_t>(t) * hop;
      for (int n = 0; n < n_fft; ++n) frame[n] = src[n] * window[n];
      fft.Forward(frame, bins);
      for (int f = 0; f < fft.NumBins(); ++f) out(c, f, t) = bins[f];
    }
  }
  return out;
}

Waveform Istft(const Spectrogram& s) {
  const StftParams& p = s.Params();
  if (!IsPowerOfTwo(p.n_fft) || s.NumBins() != p.NumBins())
    throw std::invalid_argument("Istft: inconsistent spectrogram metadata");
  if (p.hop <= 0 || p.hop > p.n_fft)
    throw std::invalid_argument("Istft: invalid hop");
  if (!SatisfiesOverlapAdd(p.window, p.n_fft, p.hop))
    throw std::invalid_argument(
        "Istft: window does not satisfy the overlap-add condition at this hop");
  if (!(p.sample_rate > 0.0))
    throw std::invalid_argument("Istft: sample rate must be positive");

  const int n_fft = p.n_fft;
  const int hop = p.hop;
  const int pad = n_fft / 2;
  const int num_frames = s.NumFrames();
  const int64_t padded_len =
      static_cast<int64_t>(n_fft) + static_cast<int64_t>(num_frames - 1) * hop;
  int64_t length = p.signal_length > 0
                       ? p.signal_length
                       : static_cast<int64_t>(num_frames - 1) * hop;
  length = std::min<int64_t>(length, padded_len - pad);

  const std::vector<double> window = MakeWindow(p.window, n_fft);
  std::vector<double> envelope(padded_len, 0.0);
  for (int t = 0; t < num_frames; ++t)
    for (int n = 0; n < n_fft; ++n)
      envelope[static_cast<int64_t>(t) * hop + n] += window[n] * window[n];

  Waveform out(s.NumChannels(), length, p.sample_rate);
  RealFft fft(n_fft);
  std::vector<cplx> bins(fft.NumBins());
  std::vector<double> frame(n_fft);
  std::vector<double> acc(padded_len);

  for (int c = 0; c < s.NumChannels(); ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < num_frames; ++t) {
      for (int f = 0; f < fft.NumBins(); ++f) bins[f] = s(c, f, t);
      // The DC and Nyquist bins of a real signal are real.
      bins.front().imag(0.0);
      bins.back().imag(0.0);
      fft.Inverse(bins, frame);
      double* dst = acc.data() + static_cast<int64_t>(t) * hop;
      for (int n = 0; n < n_fft; ++n) dst[n] += frame[n] * window[n];
    }
    auto y = out.Channel(c);
    for (int64_t i = 0; i < length; ++i) {
      double e = envelope[i + pad];
      y[i] = e > 1e-10 ? acc[i + pad] / e : 0.0;
    }
  }
  return out;
}

}  // namespace remixsep
