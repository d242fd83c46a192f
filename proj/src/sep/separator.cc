// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/sep/separator.h"

#include <cmath>
#include <stdexcept>

#include "kernels.h"
#include "remixsep/sep/diff-separator.h"

namespace remixsep {

void MaskSet::Validate() const {
  if (values.size() != static_cast<size_t>(num_sources) * num_bins * num_frames)
    throw std::invalid_argument("MaskSet: size does not match dimensions");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("MaskSet: entry outside [0, 1]");
}

ScmPair EstimateScm(const Spectrogram& x, const MaskSet& masks) {
  if (masks.num_bins != x.NumBins() || masks.num_frames != x.NumFrames())
    throw std::invalid_argument("EstimateScm: mask and spectrogram dimensions differ");
  masks.Validate();
  kernels::Dims d{masks.num_sources, x.NumChannels(), x.NumBins(), x.NumFrames()};
  const size_t mm = static_cast<size_t>(d.mics) * d.mics;
  const size_t half = static_cast<size_t>(d.sources) * d.bins * mm;
  std::vector<cplx> scm(2 * half);
  std::vector<uint8_t> fallback(2 * static_cast<size_t>(d.sources) * d.bins);
  kernels::ScmForward(d, x.Data(), masks.values, scm, fallback);

  ScmPair out;
  out.num_sources = d.sources;
  out.num_bins = d.bins;
  out.num_mics = d.mics;
  out.speech.assign(scm.begin(), scm.begin() + half);
  out.noise.assign(scm.begin() + half, scm.end());
  const size_t nf = static_cast<size_t>(d.sources) * d.bins;
  out.speech_fallback.assign(fallback.begin(), fallback.begin() + nf);
  out.noise_fallback.assign(fallback.begin() + nf, fallback.end());
  return out;
}

BeamformerWeights MvdrWeights(const ScmPair& scm, double loading,
                              MvdrForm form) {
  if (!(loading >= 0.0))
    throw std::invalid_argument("MvdrWeights: loading must be >= 0");
  kernels::Dims d{scm.num_sources, scm.num_mics, scm.num_bins, 0};
  std::vector<cplx> packed(scm.speech);
  packed.insert(packed.end(), scm.noise.begin(), scm.noise.end());
  BeamformerWeights w;
  w.num_sources = scm.num_sources;
  w.num_bins = scm.num_bins;
  w.num_mics = scm.num_mics;
  w.weights.resize(scm.speech.size());
  w.degenerate.resize(static_cast<size_t>(scm.num_sources) * scm.num_bins);
  kernels::MvdrForward(d, packed, loading, form, w.weights, w.degenerate);
  return w;
}

SeparatedSet ApplyBeamformer(const Spectrogram& x, const BeamformerWeights& w) {
  if (w.num_bins != x.NumBins() || w.num_mics != x.NumChannels())
    throw std::invalid_argument("ApplyBeamformer: dimensions differ");
  kernels::Dims d{w.num_sources, x.NumChannels(), x.NumBins(), x.NumFrames()};
  std::vector<cplx> out(static_cast<size_t>(d.sources) * x.Size());
  kernels::BeamformForward(d, w.weights, x.Data(), out);
  SeparatedSet s;
  for (int i = 0; i < d.sources; ++i) {
    Spectrogram y(d.mics, d.frames, x.Params());
    std::copy(out.begin() + i * x.Size(), out.begin() + (i + 1) * x.Size(),
              y.Data().begin());
    s.sources.push_back(std::move(y));
  }
  return s;
}

SeparatedSet SeparateWithMasks(const Spectrogram& x, const MaskSet& masks,
                               const SeparatorOptions& options) {
  return ApplyBeamformer(
      x, MvdrWeights(EstimateScm(x, masks), options.loading, options.form));
}

MaskSet IdealRatioMasks(const std::vector<Spectrogram>& images,
                        int ref_channel) {
  if (images.empty()) throw std::invalid_argument("IdealRatioMasks: no images");
  const int n = static_cast<int>(images.size());
  const int F = images[0].NumBins(), T = images[0].NumFrames();
  for (const auto& im : images) images[0].CheckCompatible(im);
  MaskSet m(n, F, T);
  for (int f = 0; f < F; ++f)
    for (int t = 0; t < T; ++t) {
      double total = 0.0;
      for (const auto& im : images) total += std::norm(im(ref_channel, f, t));
      for (int i = 0; i < n; ++i)
        m(i, f, t) = total > 0.0
                         ? std::sqrt(std::norm(images[i](ref_channel, f, t)) / total)
                         : 1.0 / n;
    }
  return m;
}

// Differentiable path.

ad::Var DiffEstimateScm(const ad::Var& x, const ad::Var& masks) {
  if (!x.IsComplex() || masks.IsComplex() || x.shape().size() != 3 ||
      masks.shape().size() != 3 || x.shape()[1] != masks.shape()[1] ||
      x.shape()[2] != masks.shape()[2])
    throw std::invalid_argument("DiffEstimateScm: expects x [M,F,T], masks [N,F,T]");
  kernels::Dims d{static_cast<int>(masks.shape()[0]),
                  static_cast<int>(x.shape()[0]),
                  static_cast<int>(x.shape()[1]),
                  static_cast<int>(x.shape()[2])};
  const int64_t mm = static_cast<int64_t>(d.mics) * d.mics;
  ad::Shape shape{2, d.sources, d.bins, d.mics, d.mics};
  std::vector<cplx> scm(2 * d.sources * d.bins * mm);
  auto fallback = std::make_shared<std::vector<uint8_t>>(2 * d.sources * d.bins);
  kernels::ScmForward(d, x.ComplexValues(), masks.RealValues(), scm, *fallback);
  return ad::MakeComplex(shape, std::move(scm), {x, masks},
                         [d, fallback](ad::Node& self) {
    ad::Node* xn = self.parents[0].get();
    ad::Node* mn = self.parents[1].get();
    std::span<cplx> gx;
    std::span<double> gm;
    if (xn->requires_grad) gx = xn->ComplexGrad();
    if (mn->requires_grad) gm = mn->RealGrad();
    kernels::ScmBackward(d, xn->cval, mn->real, self.cval, *fallback,
                         self.cplx_grad, gx, gm);
  });
}

ad::Var DiffMvdrWeights(const ad::Var& scm, double loading, MvdrForm form) {
  if (!scm.IsComplex() || scm.shape().size() != 5 || scm.shape()[0] != 2)
    throw std::invalid_argument("DiffMvdrWeights: expects scm [2,N,F,M,M]");
  if (!(loading >= 0.0))
    throw std::invalid_argument("DiffMvdrWeights: loading must be >= 0");
  kernels::Dims d{static_cast<int>(scm.shape()[1]),
                  static_cast<int>(scm.shape()[3]),
                  static_cast<int>(scm.shape()[2]), 0};
  ad::Shape shape{d.sources, d.bins, d.mics, d.mics};
  std::vector<cplx> w(ad::NumElements(shape));
  auto degenerate =
      std::make_shared<std::vector<uint8_t>>(static_cast<size_t>(d.sources) * d.bins);
  kernels::MvdrForward(d, scm.ComplexValues(), loading, form, w, *degenerate);
  return ad::MakeComplex(shape, std::move(w), {scm},
                         [d, loading, form, degenerate](ad::Node& self) {
    ad::Node* sn = self.parents[0].get();
    kernels::MvdrBackward(d, sn->cval, loading, form, *degenerate,
                          self.cplx_grad, sn->ComplexGrad());
  });
}

ad::Var DiffApplyBeamformer(const ad::Var& weights, const ad::Var& x) {
  if (!weights.IsComplex() || !x.IsComplex() || weights.shape().size() != 4 ||
      x.shape().size() != 3 || weights.shape()[1] != x.shape()[1] ||
      weights.shape()[2] != x.shape()[0] || weights.shape()[3] != x.shape()[0])
    throw std::invalid_argument("DiffApplyBeamformer: expects w [N,F,M,M], x [M,F,T]");
  kernels::Dims d{static_cast<int>(weights.shape()[0]),
                  static_cast<int>(x.shape()[0]),
                  static_cast<int>(x.shape()[1]),
                  static_cast<int>(x.shape()[2])};
  ad::Shape shape{d.sources, d.mics, d.bins, d.frames};
  std::vector<cplx> out(ad::NumElements(shape));
  kernels::BeamformForward(d, weights.ComplexValues(), x.ComplexValues(), out);
  return ad::MakeComplex(shape, std::move(out), {weights, x}, [d](ad::Node& self) {
    ad::Node* wn = self.parents[0].get();
    ad::Node* xn = self.parents[1].get();
    std::span<cplx> gw, gx;
    if (wn->requires_grad) gw = wn->ComplexGrad();
    if (xn->requires_grad) gx = xn->ComplexGrad();
    kernels::BeamformBackward(d, wn->cval, xn->cval, self.cplx_grad, gw, gx);
  });
}

ad::Var DiffSeparateWithMasks(const ad::Var& x, const ad::Var& masks,
                              const SeparatorOptions& options) {
  ad::Var scm = DiffEstimateScm(x, masks);
  ad::Var w = DiffMvdrWeights(scm, options.loading, options.form);
  return DiffApplyBeamformer(w, x);
}

ad::Var ToVar(const Spectrogram& s, bool requires_grad) {
  return ad::Var::Complex({s.NumChannels(), s.NumBins(), s.NumFrames()},
                          std::vector<cplx>(s.Data().begin(), s.Data().end()),
                          requires_grad);
}

ad::Var ToVar(const MaskSet& m, bool requires_grad) {
  return ad::Var::Real({m.num_sources, m.num_bins, m.num_frames}, m.values,
                       requires_grad);
}

Spectrogram ToSpectrogram(const ad::Var& v, const StftParams& params) {
  if (!v.IsComplex() || v.shape().size() != 3 ||
      v.shape()[1] != params.NumBins())
    throw std::invalid_argument("ToSpectrogram: expects complex [C,F,T]");
  Spectrogram s(static_cast<int>(v.shape()[0]), static_cast<int>(v.shape()[2]),
                params);
  std::copy(v.ComplexValues().begin(), v.ComplexValues().end(), s.Data().begin());
  return s;
}

SeparatedSet ToSeparatedSet(const ad::Var& v, const StftParams& params) {
  if (!v.IsComplex() || v.shape().size() != 4)
    throw std::invalid_argument("ToSeparatedSet: expects complex [N,M,F,T]");
  SeparatedSet out;
  const int64_t block = v.shape()[1] * v.shape()[2] * v.shape()[3];
  for (int64_t i = 0; i < v.shape()[0]; ++i) {
    Spectrogram s(static_cast<int>(v.shape()[1]), static_cast<int>(v.shape()[3]),
                  params);
    std::copy(v.ComplexValues().begin() + i * block,
              v.ComplexValues().begin() + (i + 1) * block, s.Data().begin());
    out.sources.push_back(std::move(s));
  }
  return out;
}

MaskSet ToMaskSet(const ad::Var& v) {
  if (v.IsComplex() || v.shape().size() != 3)
    throw std::invalid_argument("ToMaskSet: expects real [N,F,T]");
  MaskSet m(static_cast<int>(v.shape()[0]), static_cast<int>(v.shape()[1]),
            static_cast<int>(v.shape()[2]));
  std::copy(v.RealValues().begin(), v.RealValues().end(), m.values.begin());
  return m;
}

}  // namespace remixsep
