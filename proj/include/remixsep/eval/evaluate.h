// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_EVAL_EVALUATE_H_
#define REMIXSEP_EVAL_EVALUATE_H_

#include <map>
#include <string>
#include <vector>

#include "remixsep/eval/metrics.h"
#include "remixsep/nn/mask-estimator.h"
#include "remixsep/sep/separator.h"
#include "remixsep/sim/array-sim.h"

namespace remixsep {

struct EvalOptions {
  // Replace the network by ideal ratio masks computed from the images.
  bool oracle = false;
  SeparatorOptions separator;
  int n_fft = 512;
  int hop = 128;
  // 0 evaluates everything.
  int max_mixtures = 0;
  int threads = 1;
};

// Separates each record (channel 0 of every output is the estimate) and
// scores it against channel 0 of the source images. `net` may be null when
// options.oracle is set.
MetricReport EvaluateSeparator(const MaskEstimator* net,
                               const std::vector<MixtureRecord>& records,
                               const EvalOptions& options);

// Scores the unprocessed mixture (channel 0) as the estimate of every source.
MetricReport EvaluateObservation(const std::vector<MixtureRecord>& records,
                                 int max_mixtures = 0);

// Separator options stored alongside a network in a checkpoint; defaults
// when absent.
SeparatorOptions SeparatorOptionsFromMeta(const std::map<std::string, std::string>& meta);
void SeparatorOptionsToMeta(const SeparatorOptions& o,
                            std::map<std::string, std::string>& meta);

// Loads the checkpoint and the test split of the manifest. Throws
// std::runtime_error for missing files or an empty test split.
MetricReport EvaluateCheckpoint(const std::string& checkpoint_path,
                                const std::string& manifest_path,
                                EvalOptions options);

}  // namespace remixsep

#endif  // REMIXSEP_EVAL_EVALUATE_H_
