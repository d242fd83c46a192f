// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SEP_DIFF_SEPARATOR_H_
#define REMIXSEP_SEP_DIFF_SEPARATOR_H_

#include "remixsep/ad/var.h"
#include "remixsep/sep/separator.h"

namespace remixsep {

// Differentiable separator path. Tensor layouts:
//   spectrogram  complex [M, F, T]
//   masks        real    [N, F, T]
//   scm          complex [2, N, F, M, M]  (speech, noise)
//   weights      complex [N, F, M, M]
//   separated    complex [N, M, F, T]

ad::Var DiffEstimateScm(const ad::Var& x, const ad::Var& masks);
ad::Var DiffMvdrWeights(const ad::Var& scm, double loading, MvdrForm form);
ad::Var DiffApplyBeamformer(const ad::Var& weights, const ad::Var& x);
ad::Var DiffSeparateWithMasks(const ad::Var& x, const ad::Var& masks,
                              const SeparatorOptions& options = {});

ad::Var ToVar(const Spectrogram& s, bool requires_grad = false);
ad::Var ToVar(const MaskSet& m, bool requires_grad = false);
// [C, F, T] complex -> Spectrogram with the given metadata.
Spectrogram ToSpectrogram(const ad::Var& v, const StftParams& params);
// [N, M, F, T] complex -> SeparatedSet.
SeparatedSet ToSeparatedSet(const ad::Var& v, const StftParams& params);
MaskSet ToMaskSet(const ad::Var& v);

}  // namespace remixsep

#endif  // REMIXSEP_SEP_DIFF_SEPARATOR_H_
