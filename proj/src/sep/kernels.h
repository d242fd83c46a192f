// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Raw-array forward/backward kernels shared by the plain separator API and
// its differentiable counterpart. Layouts:
//   x      [M][F][T]       complex
//   masks  [N][F][T]       real
//   scm    [2][N][F][M][M] complex (0 = speech, 1 = noise)
//   w      [N][F][M][M]    complex
//   out    [N][M][F][T]    complex

#ifndef REMIXSEP_SRC_SEP_KERNELS_H_
#define REMIXSEP_SRC_SEP_KERNELS_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "remixsep/sep/separator.h"

namespace remixsep::kernels {

struct Dims {
  int sources, mics, bins, frames;
};

// fallback: [2][N][F] flags.
void ScmForward(const Dims& d, std::span<const cplx> x,
                std::span<const double> masks, std::span<cplx> scm,
                std::span<uint8_t> fallback);
// Accumulates into grad_x / grad_masks (either may be empty to skip).
void ScmBackward(const Dims& d, std::span<const cplx> x,
                 std::span<const double> masks, std::span<const cplx> scm,
                 std::span<const uint8_t> fallback,
                 std::span<const cplx> grad_scm, std::span<cplx> grad_x,
                 std::span<double> grad_masks);

// scm as above; w: [N][F][M][M]; degenerate: [N][F].
void MvdrForward(const Dims& d, std::span<const cplx> scm, double loading,
                 MvdrForm form, std::span<cplx> w,
                 std::span<uint8_t> degenerate);
void MvdrBackward(const Dims& d, std::span<const cplx> scm, double loading,
                  MvdrForm form, std::span<const uint8_t> degenerate,
                  std::span<const cplx> grad_w, std::span<cplx> grad_scm);

void BeamformForward(const Dims& d, std::span<const cplx> w,
                     std::span<const cplx> x, std::span<cplx> out);
void BeamformBackward(const Dims& d, std::span<const cplx> w,
                      std::span<const cplx> x, std::span<const cplx> grad_out,
                      std::span<cplx> grad_w, std::span<cplx> grad_x);

}  // namespace remixsep::kernels

#endif  // REMIXSEP_SRC_SEP_KERNELS_H_
