// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIGNAL_WAVEFORM_H_
#define REMIXSEP_SIGNAL_WAVEFORM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace remixsep {

// Multichannel real signal, channel-major storage.
class Waveform {
 public:
  Waveform() = default;
  Waveform(int num_channels, int64_t length, double sample_rate);

  int NumChannels() const { return num_channels_; }
  int64_t Length() const { return length_; }
  double SampleRate() const { return sample_rate_; }
  bool Empty() const { return length_ == 0 || num_channels_ == 0; }

  std::span<double> Channel(int c) {
    return {data_.data() + static_cast<size_t>(c) * length_,
            static_cast<size_t>(length_)};
  }
  std::span<const double> Channel(int c) const {
    return {data_.data() + static_cast<size_t>(c) * length_,
            static_cast<size_t>(length_)};
  }
  double& operator()(int c, int64_t n) { return data_[c * length_ + n]; }
  double operator()(int c, int64_t n) const { return data_[c * length_ + n]; }

  std::span<double> Data() { return data_; }
  std::span<const double> Data() const { return data_; }

  // Single-channel waveform holding a copy of channel c.
  Waveform ExtractChannel(int c) const;

  Waveform& operator+=(const Waveform& other);
  Waveform& operator*=(double gain);

  double SquaredNorm() const;

  // Throws std::invalid_argument if sample_rate <= 0 or any sample is not
  // finite.
  void Validate() const;

 private:
  int num_channels_ = 0;
  int64_t length_ = 0;
  double sample_rate_ = 0.0;
  std::vector<double> data_;
};

Waveform operator+(Waveform a, const Waveform& b);

}  // namespace remixsep

#endif  // REMIXSEP_SIGNAL_WAVEFORM_H_
