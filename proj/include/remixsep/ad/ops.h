// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_AD_OPS_H_
#define REMIXSEP_AD_OPS_H_

#include "remixsep/ad/var.h"

namespace remixsep::ad {

// Elementwise; operands must share dtype and shape.
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Scale(const Var& a, double s);
// s * a + shift, real only.
Var Affine(const Var& a, double s, double shift);

// Reductions to a real scalar.
Var Sum(const Var& a);
Var Mean(const Var& a);
Var SquaredNorm(const Var& a);
// Frobenius norm; the subgradient at zero is taken as zero.
Var Norm(const Var& a);

// Elementwise real activations.
Var Relu(const Var& a);
Var LeakyRelu(const Var& a, double slope);
Var Sigmoid(const Var& a);
// log(max(a, floor)); zero gradient where clamped.
Var ClampedLog(const Var& a, double floor);

// x: [rows, in], w: [in, out], b: [out] -> [rows, out].
Var Linear(const Var& x, const Var& w, const Var& b);

// Sub-tensor at index i along the leading dimension.
Var Slice0(const Var& a, int64_t i);
// Stacks equal-shaped tensors along a new leading dimension.
Var Stack0(const std::vector<Var>& parts);

// x: [C, H, W], kernel: [O, C, KH, KW], bias: [O] -> [O, H', W'] with zero
// padding `pad` on both sides and the given stride.
Var Conv2d(const Var& x, const Var& kernel, const Var& bias, int stride,
           int pad);

// Same values under a new shape with equal element count.
Var Reshape(const Var& a, Shape shape);
// [R, C] -> [C, R].
Var Transpose2d(const Var& a);
// Softmax along the last axis of a real tensor.
Var Softmax(const Var& a);

// Real log-magnitude 0.5 * log(|z|^2 + eps) of a complex tensor.
Var LogMagnitude(const Var& z, double eps);

}  // namespace remixsep::ad

#endif  // REMIXSEP_AD_OPS_H_
