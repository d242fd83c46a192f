// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_NN_ADAM_H_
#define REMIXSEP_NN_ADAM_H_

#include <cstdint>

#include "remixsep/nn/parameters.h"

namespace remixsep {

struct AdamOptions {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(const AdamOptions& opts, const ParameterSet& params);

  // Bias-corrected update of `params`. A gradient with any non-finite entry
  // leaves parameters and moments untouched and returns false.
  bool Step(ParameterSet& params, const GradientMap& grads);

  const AdamOptions& options() const { return opts_; }
  int64_t step() const { return step_; }
  int64_t skipped() const { return skipped_; }
  const ParameterSet& first_moment() const { return m_; }
  const ParameterSet& second_moment() const { return v_; }

  // For checkpoint restore.
  void Restore(int64_t step, ParameterSet m, ParameterSet v, int64_t skipped = 0);

 private:
  AdamOptions opts_;
  int64_t step_ = 0;
  int64_t skipped_ = 0;
  ParameterSet m_, v_;
};

}  // namespace remixsep

#endif  // REMIXSEP_NN_ADAM_H_
