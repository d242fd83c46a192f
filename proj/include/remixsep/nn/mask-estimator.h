// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_NN_MASK_ESTIMATOR_H_
#define REMIXSEP_NN_MASK_ESTIMATOR_H_

#include <map>
#include <string>
#include <vector>

#include "remixsep/ad/var.h"
#include "remixsep/nn/checkpoint.h"
#include "remixsep/nn/parameters.h"
#include "remixsep/sep/separator.h"
#include "remixsep/sim/array-sim.h"

namespace remixsep {

struct MaskEstimatorConfig {
  int num_sources = 2;
  std::vector<int> hidden = {32, 32};
  // Frames of log-magnitude context on each side.
  int context = 3;
  int n_fft = 512;
  double sample_rate = 16000.0;
  // Added to |x|^2 before the log.
  double log_floor = 1e-6;
  // Smooths the phase normalisation q / |q| near |q| = 0.
  double phase_floor = 1e-6;
  ArrayGeometry geometry = DefaultGeometry();

  int NumBins() const { return n_fft / 2 + 1; }
  void Validate() const;
  std::map<std::string, std::string> ToMeta() const;
  static MaskEstimatorConfig FromMeta(const std::map<std::string, std::string>& meta);
};

// Mask network shared across time-frequency bins. Each bin (f, t) gets a
// feature row
//   [ log-magnitude of channel 0 at frames t-C..t+C (utterance-mean removed),
//     K direction scores Re(sum_m u_m conj(a_m) a_0) / (M-1) over the
//       steering grid, u_m the unit-modulus cross-spectrum x_m conj(x_0),
//     the utterance mean of the K scores,
//     f / (F-1) ],
// which goes through ReLU layers to N logits and a softmax across sources.
class MaskEstimator {
 public:
  MaskEstimator() = default;
  explicit MaskEstimator(const MaskEstimatorConfig& cfg);

  // Uniform +-1/sqrt(fan_in) weights, zero biases.
  void Initialize(uint64_t seed);

  const MaskEstimatorConfig& config() const { return cfg_; }
  int FeatureDim() const;
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  // Throws std::invalid_argument if `p` does not fit this network.
  void SetParams(const ParameterSet& p);

  // x: complex [M, F, T] -> real [F*T, FeatureDim()], row f*T + t.
  // Differentiable with respect to x.
  ad::Var Features(const ad::Var& x) const;
  // x: complex [M, F, T] -> masks real [N, F, T], using the given leaves
  // (from params().Leaves()) as weights.
  ad::Var Forward(const ad::Var& x,
                  const std::map<std::string, ad::Var>& leaves) const;
  // Inference with the current parameters.
  MaskSet Estimate(const Spectrogram& x) const;

  // Parameters go under "sep/", the configuration into the metadata.
  void SaveTo(Checkpoint& ckpt) const;
  static MaskEstimator FromCheckpoint(const Checkpoint& ckpt);

 private:
  MaskEstimatorConfig cfg_;
  ParameterSet params_;
  std::vector<double> directions_;
  // Per direction k, mic m >= 1, bin f: conj(a_m) a_0 / (M - 1).
  std::vector<cplx> score_weights_;
};

}  // namespace remixsep

#endif  // REMIXSEP_NN_MASK_ESTIMATOR_H_
