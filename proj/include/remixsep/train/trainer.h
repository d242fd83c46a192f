// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_TRAIN_TRAINER_H_
#define REMIXSEP_TRAIN_TRAINER_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "remixsep/ad/var.h"
#include "remixsep/nn/checkpoint.h"
#include "remixsep/nn/discriminator.h"
#include "remixsep/nn/mask-estimator.h"
#include "remixsep/obj/objectives.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/train/config.h"
#include "remixsep/train/run-log.h"
#include "remixsep/util/rng.h"

namespace remixsep {

// A non-finite training loss. The last checkpoint written before the
// failing step is left in place.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int64_t step, std::string checkpoint)
      : std::runtime_error(what), step_(step), checkpoint_(std::move(checkpoint)) {}
  int64_t step() const { return step_; }
  const std::string& checkpoint() const { return checkpoint_; }

 private:
  int64_t step_;
  std::string checkpoint_;
};

struct TrainResult {
  Checkpoint checkpoint;
  RunLog log;
  // Mean training objective of each epoch run.
  std::vector<double> epoch_objective;
  // Written to out_dir; empty when out_dir is empty.
  std::string checkpoint_path;
  std::string log_path;
  // Rccl only: mean cycle loss on fixed probe pairs before and after.
  double probe_cycle_before = 0.0;
  double probe_cycle_after = 0.0;
};

// Distinct-index pairs covering a fresh shuffle of [0, n) per n / 2 pairs.
std::vector<std::pair<int, int>> MakePairs(int n, int count, Rng& rng);

// Throws std::invalid_argument when x1 and x2 are the same observation.
void CheckDistinctPair(const ad::Var& x1, const ad::Var& x2);

struct CycleTerms {
  ad::Var total;
  ad::Var cycle;
  ad::Var energy;
  ad::Var gan;
  Assignment chosen;
};

// separate -> cross remix -> separate -> best assignment -> cycle loss on
// one pair of mixtures [M, F, T], plus the optional weighted terms. `disc`
// may be null when weights.gan is zero.
CycleTerms CycleForward(const MaskEstimator& net,
                        const std::map<std::string, ad::Var>& leaves,
                        const ad::Var& x1, const ad::Var& x2,
                        const SeparatorOptions& sep, const LossWeights& weights,
                        const Discriminator* disc = nullptr,
                        const std::map<std::string, ad::Var>* disc_leaves = nullptr);

// Each stage trains from `init` if given (separator and, when present,
// discriminator parameters) and otherwise from seeded initialisation.
// cfg.resume_checkpoint takes precedence over `init`.
TrainResult TrainAdversarial(const TrainConfig& cfg, const Dataset& data);
TrainResult TrainRccl(const TrainConfig& cfg, const Dataset& data,
                      const Checkpoint* init);
TrainResult TrainPit(const TrainConfig& cfg, const Dataset& data);
TrainResult Train(const TrainConfig& cfg, const Dataset& data,
                  const Checkpoint* init = nullptr);
// Loads cfg.manifest and cfg.init_checkpoint, then Train().
TrainResult TrainFromConfig(const TrainConfig& cfg);

// Supervised fit of the mask estimator to the power-ratio masks of the
// true images (squared error), from seeded initialisation. Produces a
// near-oracle starting point.
Checkpoint DistillOracleMasks(const TrainConfig& cfg, const Dataset& data,
                              int epochs);

// Mean cycle loss over the pairs on centred crops of cfg.segment_frames
// frames, without gradients.
double MeanCycleLoss(const MaskEstimator& net,
                     const std::vector<MixtureRecord>& records,
                     const std::vector<std::pair<int, int>>& pairs,
                     const TrainConfig& cfg);

}  // namespace remixsep

#endif  // REMIXSEP_TRAIN_TRAINER_H_
