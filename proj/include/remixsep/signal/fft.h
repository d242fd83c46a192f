// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIGNAL_FFT_H_
#define REMIXSEP_SIGNAL_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace remixsep {

// Real-to-complex FFT of a fixed size backed by FFTW. Plans are created once
// per size (under a lock) and shared; execution is thread-safe. Estimate-mode
// planning keeps the chosen algorithm, and therefore the output bits,
// reproducible from run to run.
class RealFft {
 public:
  explicit RealFft(int n);

  int Size() const { return n_; }
  int NumBins() const { return n_ / 2 + 1; }

  // in: n samples; out: n/2 + 1 bins. Unnormalized forward transform.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // in: n/2 + 1 bins; out: n samples. Includes the 1/n normalization, so
  // Inverse(Forward(x)) == x.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

int NextPowerOfTwo(int64_t n);
bool IsPowerOfTwo(int64_t n);

}  // namespace remixsep

#endif  // REMIXSEP_SIGNAL_FFT_H_
