// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/nn/adam.h"

#include <cmath>
#include <stdexcept>

namespace remixsep {

Adam::Adam(const AdamOptions& opts, const ParameterSet& params)
    : opts_(opts), m_(params.ZerosLike()), v_(params.ZerosLike()) {
  if (!(opts.learning_rate > 0.0) || !(opts.beta1 >= 0.0 && opts.beta1 < 1.0) ||
      !(opts.beta2 >= 0.0 && opts.beta2 < 1.0) || !(opts.epsilon > 0.0))
    throw std::invalid_argument("Adam: invalid options");
}

bool Adam::Step(ParameterSet& params, const GradientMap& grads) {
  if (!params.SameLayout(m_))
    throw std::invalid_argument("Adam: parameter layout changed");
  if (!AllFinite(grads)) {
    ++skipped_;
    return false;
  }
  ++step_;
  const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_));
  for (const auto& name : params.Names()) {
    auto it = grads.find(name);
    if (it == grads.end()) continue;
    auto& p = params.Get(name).values;
    auto& m = m_.Get(name).values;
    auto& v = v_.Get(name).values;
    const auto& g = it->second;
    if (g.size() != p.size())
      throw std::invalid_argument("Adam: gradient size mismatch for " + name);
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g[i];
      v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g[i] * g[i];
      p[i] -= opts_.learning_rate * (m[i] / c1) /
              (std::sqrt(v[i] / c2) + opts_.epsilon);
    }
  }
  return true;
}

void Adam::Restore(int64_t step, ParameterSet m, ParameterSet v, int64_t skipped) {
  if (!m.SameLayout(m_) || !v.SameLayout(v_) || step < 0 || skipped < 0)
    throw std::invalid_argument("Adam: restored state does not match");
  step_ = step;
  skipped_ = skipped;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace remixsep
