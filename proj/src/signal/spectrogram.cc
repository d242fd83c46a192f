// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/signal/spectrogram.h"

#include <cmath>
#include <stdexcept>

namespace remixsep {

Spectrogram::Spectrogram(int num_channels, int num_frames,
                         const StftParams& params)
    : num_channels_(num_channels),
      num_bins_(params.NumBins()),
      num_frames_(num_frames),
      params_(params) {
  if (num_channels < 0 || num_frames < 0 || params.n_fft < 2)
    throw std::invalid_argument("Spectrogram: invalid dimensions");
  data_.assign(static_cast<size_t>(num_channels_) * num_bins_ * num_frames_,
               cplx(0.0, 0.0));
}

void Spectrogram::CheckCompatible(const Spectrogram& o) const {
  if (!SameShape(o))
    throw std::invalid_argument("Spectrogram: shape mismatch");
  if (!params_.CompatibleWith(o.params_))
    throw std::invalid_argument("Spectrogram: STFT metadata mismatch");
}

Spectrogram& Spectrogram::operator+=(const Spectrogram& o) {
  CheckCompatible(o);
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Spectrogram& Spectrogram::operator-=(const Spectrogram& o) {
  CheckCompatible(o);
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Spectrogram& Spectrogram::operator*=(cplx gain) {
  for (cplx& v : data_) v *= gain;
  return *this;
}

double Spectrogram::SquaredNorm() const {
  double acc = 0.0;
  for (const cplx& v : data_) acc += std::norm(v);
  return acc;
}

double Spectrogram::Norm() const { return std::sqrt(SquaredNorm()); }

Spectrogram Spectrogram::Frames(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > num_frames_)
    throw std::out_of_range("Spectrogram: frame range out of bounds");
  StftParams p = params_;
  p.signal_length = 0;
  Spectrogram out(num_channels_, count, p);
  for (int c = 0; c < num_channels_; ++c)
    for (int f = 0; f < num_bins_; ++f)
      for (int t = 0; t < count; ++t) out(c, f, t) = (*this)(c, f, begin + t);
  return out;
}

Spectrogram Spectrogram::ExtractChannel(int c) const {
  if (c < 0 || c >= num_channels_)
    throw std::out_of_range("Spectrogram: channel index out of range");
  Spectrogram out(1, num_frames_, params_);
  for (int f = 0; f < num_bins_; ++f)
    for (int t = 0; t < num_frames_; ++t) out(0, f, t) = (*this)(c, f, t);
  return out;
}

void Spectrogram::Validate() const {
  if (num_bins_ != params_.NumBins())
    throw std::invalid_argument("Spectrogram: bin count != n_fft/2 + 1");
  for (const cplx& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("Spectrogram: non-finite bin");
}

Spectrogram operator+(Spectrogram a, const Spectrogram& b) {
  a += b;
  return a;
}

Spectrogram operator-(Spectrogram a, const Spectrogram& b) {
  a -= b;
  return a;
}

Spectrogram operator*(cplx gain, Spectrogram a) {
  a *= gain;
  return a;
}

}  // namespace remixsep
