// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SEP_SEPARATOR_H_
#define REMIXSEP_SEP_SEPARATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "remixsep/signal/spectrogram.h"

namespace remixsep {

class MaskEstimator;

// Real TF masks in [0, 1], indexed (source, frequency, frame).
struct MaskSet {
  int num_sources = 0;
  int num_bins = 0;
  int num_frames = 0;
  std::vector<double> values;

  MaskSet() = default;
  MaskSet(int n, int f, int t, double fill = 0.0)
      : num_sources(n), num_bins(f), num_frames(t),
        values(static_cast<size_t>(n) * f * t, fill) {}

  double& operator()(int i, int f, int t) {
    return values[(static_cast<size_t>(i) * num_bins + f) * num_frames + t];
  }
  double operator()(int i, int f, int t) const {
    return values[(static_cast<size_t>(i) * num_bins + f) * num_frames + t];
  }
  // Throws std::invalid_argument if an entry lies outside [0, 1].
  void Validate() const;
};

// Per (source, frequency) speech and noise spatial covariance matrices,
// each stored row-major as M x M.
struct ScmPair {
  int num_sources = 0;
  int num_bins = 0;
  int num_mics = 0;
  std::vector<cplx> speech;
  std::vector<cplx> noise;
  // Set where the mask weight vanished and the loaded-identity fallback
  // was used instead of the weighted average.
  std::vector<uint8_t> speech_fallback;
  std::vector<uint8_t> noise_fallback;

  size_t Offset(int i, int f) const {
    return (static_cast<size_t>(i) * num_bins + f) * num_mics * num_mics;
  }
  cplx Speech(int i, int f, int a, int b) const {
    return speech[Offset(i, f) + a * num_mics + b];
  }
  cplx Noise(int i, int f, int a, int b) const {
    return noise[Offset(i, f) + a * num_mics + b];
  }
};

enum class MvdrForm {
  // W = (Rn^-1 Rs) / tr(Rn^-1 Rs)
  kInverse,
  // W = (Rn Rs) / tr(Rn Rs), exactly as the filter is sometimes printed.
  kLiteral,
};

struct BeamformerWeights {
  int num_sources = 0;
  int num_bins = 0;
  int num_mics = 0;
  // Per (source, frequency), M x M row-major.
  std::vector<cplx> weights;
  // Frequencies whose normalizing trace vanished; weights there are I / M.
  std::vector<uint8_t> degenerate;

  size_t Offset(int i, int f) const {
    return (static_cast<size_t>(i) * num_bins + f) * num_mics * num_mics;
  }
  cplx operator()(int i, int f, int a, int b) const {
    return weights[Offset(i, f) + a * num_mics + b];
  }
};

struct SeparatedSet {
  std::vector<Spectrogram> sources;  // each M channels
  std::string origin;
};

struct SeparatorOptions {
  MvdrForm form = MvdrForm::kInverse;
  // Diagonal loading of the noise SCM, relative to its mean diagonal.
  double loading = 1e-3;
};

// Mask weights below this total are treated as an all-zero mask.
inline constexpr double kMinMaskWeight = 1e-12;
// |tr| below this marks a degenerate frequency.
inline constexpr double kMinTrace = 1e-12;
// Added to the fallback identity so it is invertible even for silence.
inline constexpr double kFallbackFloor = 1e-10;

// Speech SCM: sum_t m x x^H / sum_t m; noise SCM likewise with 1 - m. An
// all-zero weight falls back to (mean channel power + floor) * I. Throws
// std::invalid_argument on dimension mismatch.
ScmPair EstimateScm(const Spectrogram& x, const MaskSet& masks);

// Mask-based MVDR filter per source and frequency. For the inverse form the
// noise SCM is loaded with loading * tr(Rn) / M on the diagonal first.
BeamformerWeights MvdrWeights(const ScmPair& scm, double loading = 1e-3,
                              MvdrForm form = MvdrForm::kInverse);

// s_i(f, t) = W_i(f)^H x(f, t); one M-channel output per source.
SeparatedSet ApplyBeamformer(const Spectrogram& x, const BeamformerWeights& w);

SeparatedSet SeparateWithMasks(const Spectrogram& x, const MaskSet& masks,
                               const SeparatorOptions& options = {});

// Mask estimation followed by SCM, MVDR and filtering.
SeparatedSet Separate(const Spectrogram& x, const MaskEstimator& net,
                      const SeparatorOptions& options = {});

// Ideal ratio masks sqrt(|S_i|^2 / sum_j |S_j|^2) from the reference
// channel of the source images; bins where every image is silent get 1/N.
MaskSet IdealRatioMasks(const std::vector<Spectrogram>& images,
                        int ref_channel = 0);

}  // namespace remixsep

#endif  // REMIXSEP_SEP_SEPARATOR_H_
