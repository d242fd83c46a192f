// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/signal/waveform.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace remixsep {

Waveform::Waveform(int num_channels, int64_t length, double sample_rate)
    : num_channels_(num_channels), length_(length), sample_rate_(sample_rate) {
  if (num_channels < 0 || length < 0)
    throw std::invalid_argument("Waveform: negative dimensions");
  data_.assign(static_cast<size_t>(num_channels) * length, 0.0);
}

Waveform Waveform::ExtractChannel(int c) const {
  if (c < 0 || c >= num_channels_)
    throw std::out_of_range("Waveform: channel index out of range");
  Waveform out(1, length_, sample_rate_);
  std::ranges::copy(Channel(c), out.Channel(0).begin());
  return out;
}

Waveform& Waveform::operator+=(const Waveform& other) {
  if (other.num_channels_ != num_channels_ || other.length_ != length_)
    throw std::invalid_argument("Waveform: shape mismatch in addition");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Waveform& Waveform::operator*=(double gain) {
  for (double& v : data_) v *= gain;
  return *this;
}

double Waveform::SquaredNorm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return acc;
}

void Waveform::Validate() const {
  if (!(sample_rate_ > 0.0))
    throw std::invalid_argument("Waveform: sample rate must be positive");
  for (double v : data_)
    if (!std::isfinite(v))
      throw std::invalid_argument("Waveform: non-finite sample");
}

Waveform operator+(Waveform a, const Waveform& b) {
  a += b;
  return a;
}

}  // namespace remixsep
