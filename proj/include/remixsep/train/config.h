// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_TRAIN_CONFIG_H_
#define REMIXSEP_TRAIN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "remixsep/nn/adam.h"
#include "remixsep/nn/discriminator.h"
#include "remixsep/nn/mask-estimator.h"
#include "remixsep/sep/separator.h"

namespace remixsep {

enum class Stage { kAdversarial, kRccl, kPit };

// "al", "rccl", "pit".
std::string StageName(Stage s);
Stage ParseStage(const std::string& s);

struct LossWeights {
  double gan = 0.0;
  double cycle = 0.0;
  double energy = 0.0;
};

struct TrainConfig {
  Stage stage = Stage::kAdversarial;
  int epochs_al = 30;
  int epochs_rccl = 15;
  int epochs_pit = 30;
  int batch_size = 8;
  double learning_rate = 5e-4;
  double disc_learning_rate = 5e-4;
  // Unset weights take the stage defaults: adversarial stage gan = 1,
  // rccl stage cycle = 1, everything else 0.
  std::optional<double> lambda_gan, lambda_cycle, lambda_energy;
  uint64_t seed = 0;
  // Frames per random training crop.
  int segment_frames = 64;
  int n_fft = 512;
  int hop = 128;
  // Mixture pairs per stage-2 epoch; 0 means every train mixture once.
  int pairs_per_epoch = 0;
  // Mixtures per stage-1 / PIT epoch; 0 means all.
  int mixtures_per_epoch = 0;
  int val_mixtures = 8;
  int val_every = 1;
  int threads = 1;
  SeparatorOptions separator;
  MaskEstimatorConfig net;
  DiscriminatorConfig disc;

  std::string manifest;
  std::string out_dir;
  std::string init_checkpoint;
  std::string resume_checkpoint;
  // Test hook: the loss of this global step is replaced by NaN.
  int64_t nan_at_step = -1;
  // Wall-clock timings in the run log; off for byte-comparable logs.
  bool log_wall_clock = true;

  int Epochs() const;
  LossWeights Weights() const;
  AdamOptions SeparatorAdam() const;
  AdamOptions DiscriminatorAdam() const;
  // Throws std::invalid_argument on out-of-range values.
  void Validate() const;
  // Canonical key = value listing of every field that affects results
  // (paths and thread count excluded).
  std::string CanonicalText() const;
  std::string Hash() const;
};

// INI-style file with sections [data], [train], [loss], [separator],
// [discriminator], [fault]. Unknown sections or keys and malformed values
// throw std::invalid_argument; missing keys keep their defaults.
TrainConfig LoadTrainConfig(const std::string& path);
TrainConfig ParseTrainConfig(const std::string& text);

}  // namespace remixsep

#endif  // REMIXSEP_TRAIN_CONFIG_H_
