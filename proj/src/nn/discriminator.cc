// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/nn/discriminator.h"

#include <cmath>
#include <stdexcept>

#include "remixsep/ad/ops.h"
#include "remixsep/util/rng.h"

namespace remixsep {

void DiscriminatorConfig::Validate() const {
  const size_t n = channels.size();
  if (n == 0 || kernels.size() != n || strides.size() != n)
    throw std::invalid_argument("discriminator: layer lists differ in length");
  if (channels.back() != 1)
    throw std::invalid_argument("discriminator: last layer must have 1 channel");
  for (size_t i = 0; i < n; ++i)
    if (channels[i] < 1 || kernels[i] < 1 || kernels[i] % 2 == 0 || strides[i] < 1)
      throw std::invalid_argument("discriminator: bad layer " + std::to_string(i));
  if (!(log_floor > 0.0)) throw std::invalid_argument("discriminator: log floor");
}

Discriminator::Discriminator(const DiscriminatorConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  int in = 1;
  for (size_t l = 0; l < cfg_.channels.size(); ++l) {
    const int out = cfg_.channels[l], k = cfg_.kernels[l];
    params_.Add("conv" + std::to_string(l) + ".w", {out, in, k, k},
                std::vector<double>(static_cast<size_t>(out) * in * k * k, 0.0));
    params_.Add("conv" + std::to_string(l) + ".b", {out},
                std::vector<double>(out, 0.0));
    in = out;
  }
}

void Discriminator::Initialize(uint64_t seed) {
  Rng rng(seed, {stream::kInitDiscriminator});
  for (const auto& name : params_.Names()) {
    Tensor& t = params_.Get(name);
    if (t.shape.size() == 4) {
      const double fan_in = static_cast<double>(t.shape[1] * t.shape[2] * t.shape[3]);
      const double bound = 1.0 / std::sqrt(fan_in);
      for (double& v : t.values) v = rng.Uniform(-bound, bound);
    } else {
      std::fill(t.values.begin(), t.values.end(), 0.0);
    }
  }
}

void Discriminator::SetParams(const ParameterSet& p) {
  if (!p.SameLayout(params_))
    throw std::invalid_argument("Discriminator: parameter layout mismatch");
  params_ = p;
}

ad::Var Discriminator::Forward(
    const ad::Var& spec, const std::map<std::string, ad::Var>& leaves) const {
  if (!spec.IsComplex() || spec.shape().size() != 2)
    throw std::invalid_argument("Discriminator: expects complex [F, T]");
  ad::Var h = ad::Affine(ad::LogMagnitude(spec, cfg_.log_floor), cfg_.input_scale, 0.0);
  h = ad::Reshape(h, {1, spec.shape()[0], spec.shape()[1]});
  const size_t L = cfg_.channels.size();
  for (size_t l = 0; l < L; ++l) {
    auto w = leaves.find("conv" + std::to_string(l) + ".w");
    auto b = leaves.find("conv" + std::to_string(l) + ".b");
    if (w == leaves.end() || b == leaves.end())
      throw std::invalid_argument("Discriminator: missing layer parameters");
    h = ad::Conv2d(h, w->second, b->second, cfg_.strides[l], cfg_.kernels[l] / 2);
    if (l + 1 < L) h = ad::LeakyRelu(h, cfg_.leaky_slope);
  }
  return ad::Sigmoid(ad::Mean(h));
}

double Discriminator::Score(const Spectrogram& s) const {
  Spectrogram c0 = s.ExtractChannel(0);
  ad::Var v = ad::Var::Complex({c0.NumBins(), c0.NumFrames()},
                               std::vector<cplx>(c0.Data().begin(), c0.Data().end()));
  return Forward(v, params_.Leaves(false)).Item();
}

}  // namespace remixsep
