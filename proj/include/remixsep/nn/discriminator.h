// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_NN_DISCRIMINATOR_H_
#define REMIXSEP_NN_DISCRIMINATOR_H_

#include <map>
#include <string>
#include <vector>

#include "remixsep/ad/var.h"
#include "remixsep/nn/parameters.h"
#include "remixsep/signal/spectrogram.h"

namespace remixsep {

struct DiscriminatorConfig {
  // Output channels, kernel sizes, strides and paddings per conv layer; the
  // last layer must have one output channel.
  std::vector<int> channels = {8, 8, 8, 1};
  std::vector<int> kernels = {5, 5, 3, 3};
  std::vector<int> strides = {2, 2, 2, 1};
  double leaky_slope = 0.2;
  double log_floor = 1e-10;
  // Applied to the log-magnitude before the first layer.
  double input_scale = 0.25;

  void Validate() const;
};

// Strided conv stack over the log-magnitude of a single-channel
// spectrogram, globally averaged to one logit, then a sigmoid.
class Discriminator {
 public:
  Discriminator() = default;
  explicit Discriminator(const DiscriminatorConfig& cfg);

  void Initialize(uint64_t seed);
  const DiscriminatorConfig& config() const { return cfg_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  void SetParams(const ParameterSet& p);

  // spec: complex [F, T] -> probability scalar in (0, 1).
  ad::Var Forward(const ad::Var& spec,
                  const std::map<std::string, ad::Var>& leaves) const;
  // Channel 0 of `s` with the current parameters.
  double Score(const Spectrogram& s) const;

 private:
  DiscriminatorConfig cfg_;
  ParameterSet params_;
};

}  // namespace remixsep

#endif  // REMIXSEP_NN_DISCRIMINATOR_H_
