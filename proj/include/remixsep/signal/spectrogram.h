// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIGNAL_SPECTROGRAM_H_
#define REMIXSEP_SIGNAL_SPECTROGRAM_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace remixsep {

using cplx = std::complex<double>;

enum class WindowType { kHannPeriodic };

struct StftParams {
  int n_fft = 512;
  int hop = 128;
  WindowType window = WindowType::kHannPeriodic;
  double sample_rate = 16000.0;
  // Length of the analysed signal in samples; lets istft restore it.
  int64_t signal_length = 0;

  int NumBins() const { return n_fft / 2 + 1; }
  // Two spectrograms may be combined only if these agree.
  bool CompatibleWith(const StftParams& o) const {
    return n_fft == o.n_fft && hop == o.hop && window == o.window;
  }
};

// One-sided complex STFT indexed (channel, frequency, frame), stored
// channel-major then frequency then frame.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(int num_channels, int num_frames, const StftParams& params);

  int NumChannels() const { return num_channels_; }
  int NumBins() const { return num_bins_; }
  int NumFrames() const { return num_frames_; }
  const StftParams& Params() const { return params_; }
  size_t Size() const { return data_.size(); }

  cplx& operator()(int c, int f, int t) { return data_[Index(c, f, t)]; }
  const cplx& operator()(int c, int f, int t) const {
    return data_[Index(c, f, t)];
  }
  size_t Index(int c, int f, int t) const {
    return (static_cast<size_t>(c) * num_bins_ + f) * num_frames_ + t;
  }

  std::span<cplx> Data() { return data_; }
  std::span<const cplx> Data() const { return data_; }

  bool SameShape(const Spectrogram& o) const {
    return num_channels_ == o.num_channels_ && num_bins_ == o.num_bins_ &&
           num_frames_ == o.num_frames_;
  }
  // Throws std::invalid_argument unless shapes and metadata agree.
  void CheckCompatible(const Spectrogram& o) const;

  Spectrogram& operator+=(const Spectrogram& o);
  Spectrogram& operator-=(const Spectrogram& o);
  Spectrogram& operator*=(cplx gain);

  double SquaredNorm() const;
  double Norm() const;

  // Copies frames [begin, begin + count).
  Spectrogram Frames(int begin, int count) const;
  Spectrogram ExtractChannel(int c) const;

  void Validate() const;

 private:
  int num_channels_ = 0;
  int num_bins_ = 0;
  int num_frames_ = 0;
  StftParams params_;
  std::vector<cplx> data_;
};

Spectrogram operator+(Spectrogram a, const Spectrogram& b);
Spectrogram operator-(Spectrogram a, const Spectrogram& b);
Spectrogram operator*(cplx gain, Spectrogram a);

}  // namespace remixsep

#endif  // REMIXSEP_SIGNAL_SPECTROGRAM_H_
