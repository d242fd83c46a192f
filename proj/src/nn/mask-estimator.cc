// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/nn/mask-estimator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "remixsep/ad/ops.h"
#include "remixsep/sep/diff-separator.h"
#include "remixsep/util/rng.h"

namespace remixsep {

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

const std::string& Lookup(const std::map<std::string, std::string>& meta,
                          const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end())
    throw std::runtime_error("mask estimator metadata lacks '" + key + "'");
  return it->second;
}

}  // namespace

void MaskEstimatorConfig::Validate() const {
  if (num_sources < 2) throw std::invalid_argument("mask estimator: need >= 2 sources");
  if (context < 0) throw std::invalid_argument("mask estimator: context < 0");
  if (n_fft < 4 || n_fft % 2)
    throw std::invalid_argument("mask estimator: n_fft must be even and >= 4");
  for (int h : hidden)
    if (h <= 0) throw std::invalid_argument("mask estimator: hidden size <= 0");
  if (!(log_floor > 0.0) || !(phase_floor > 0.0) || !(sample_rate > 0.0))
    throw std::invalid_argument("mask estimator: floors and rate must be > 0");
  geometry.Validate();
}

std::map<std::string, std::string> MaskEstimatorConfig::ToMeta() const {
  std::map<std::string, std::string> m;
  m["sep.num_sources"] = std::to_string(num_sources);
  std::string h;
  for (size_t i = 0; i < hidden.size(); ++i)
    h += (i ? "," : "") + std::to_string(hidden[i]);
  m["sep.hidden"] = h;
  m["sep.context"] = std::to_string(context);
  m["sep.n_fft"] = std::to_string(n_fft);
  m["sep.sample_rate"] = Num(sample_rate);
  m["sep.log_floor"] = Num(log_floor);
  m["sep.phase_floor"] = Num(phase_floor);
  m["sep.speed_of_sound"] = Num(geometry.speed_of_sound);
  std::string mics;
  for (size_t i = 0; i < geometry.mic_positions.size(); ++i) {
    if (i) mics += ";";
    mics += Num(geometry.mic_positions[i][0]) + "," +
            Num(geometry.mic_positions[i][1]);
  }
  m["sep.mics"] = mics;
  return m;
}

MaskEstimatorConfig MaskEstimatorConfig::FromMeta(
    const std::map<std::string, std::string>& meta) {
  MaskEstimatorConfig c;
  c.num_sources = std::stoi(Lookup(meta, "sep.num_sources"));
  c.hidden.clear();
  for (const auto& s : SplitOn(Lookup(meta, "sep.hidden"), ','))
    if (!s.empty()) c.hidden.push_back(std::stoi(s));
  c.context = std::stoi(Lookup(meta, "sep.context"));
  c.n_fft = std::stoi(Lookup(meta, "sep.n_fft"));
  c.sample_rate = std::stod(Lookup(meta, "sep.sample_rate"));
  c.log_floor = std::stod(Lookup(meta, "sep.log_floor"));
  c.phase_floor = std::stod(Lookup(meta, "sep.phase_floor"));
  c.geometry.speed_of_sound = std::stod(Lookup(meta, "sep.speed_of_sound"));
  c.geometry.mic_positions.clear();
  for (const auto& p : SplitOn(Lookup(meta, "sep.mics"), ';')) {
    auto xy = SplitOn(p, ',');
    if (xy.size() != 2) throw std::runtime_error("mask estimator: bad mic entry");
    c.geometry.mic_positions.push_back({std::stod(xy[0]), std::stod(xy[1])});
  }
  c.Validate();
  return c;
}

MaskEstimator::MaskEstimator(const MaskEstimatorConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  directions_ = DirectionGrid();
  const int M = cfg_.geometry.NumMics(), F = cfg_.NumBins();
  const int K = static_cast<int>(directions_.size());
  score_weights_.resize(static_cast<size_t>(K) * (M - 1) * F);
  for (int k = 0; k < K; ++k) {
    SteeringVector a = ComputeSteeringVector(cfg_.geometry, directions_[k],
                                             cfg_.n_fft, cfg_.sample_rate);
    for (int m = 1; m < M; ++m)
      for (int f = 0; f < F; ++f)
        score_weights_[(static_cast<size_t>(k) * (M - 1) + m - 1) * F + f] =
            std::conj(a(m, f)) * a(0, f) / static_cast<double>(M - 1);
  }
  int in = FeatureDim();
  for (size_t l = 0; l <= cfg_.hidden.size(); ++l) {
    int out = l < cfg_.hidden.size() ? cfg_.hidden[l] : cfg_.num_sources;
    params_.Add("layer" + std::to_string(l) + ".w", {in, out},
                std::vector<double>(static_cast<size_t>(in) * out, 0.0));
    params_.Add("layer" + std::to_string(l) + ".b", {out},
                std::vector<double>(out, 0.0));
    in = out;
  }
}

int MaskEstimator::FeatureDim() const {
  return 2 * cfg_.context + 1 + 2 * static_cast<int>(directions_.size()) + 1;
}

void MaskEstimator::Initialize(uint64_t seed) {
  Rng rng(seed, {stream::kInitSeparator});
  for (const auto& name : params_.Names()) {
    Tensor& t = params_.Get(name);
    if (t.shape.size() == 2) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[0]));
      for (double& v : t.values) v = rng.Uniform(-bound, bound);
    } else {
      std::fill(t.values.begin(), t.values.end(), 0.0);
    }
  }
}

void MaskEstimator::SetParams(const ParameterSet& p) {
  if (!p.SameLayout(params_))
    throw std::invalid_argument("MaskEstimator: parameter layout mismatch");
  params_ = p;
}

ad::Var MaskEstimator::Features(const ad::Var& x) const {
  const int M = cfg_.geometry.NumMics(), F = cfg_.NumBins();
  if (!x.IsComplex() || x.shape().size() != 3 || x.shape()[0] != M ||
      x.shape()[1] != F)
    throw std::invalid_argument(
        "MaskEstimator: expected input [" + std::to_string(M) + ", " +
        std::to_string(F) + ", T], got " + ad::ShapeString(x.shape()));
  const int T = static_cast<int>(x.shape()[2]);
  if (T < 1) throw std::invalid_argument("MaskEstimator: no frames");
  const int K = static_cast<int>(directions_.size());
  const int C = cfg_.context, W = 2 * C + 1, D = FeatureDim();
  const int64_t R = static_cast<int64_t>(F) * T;
  const double eps = cfg_.log_floor, delta2 = cfg_.phase_floor * cfg_.phase_floor;
  auto xv = x.ComplexValues();
  auto X = [&](int m, int f, int t) -> cplx {
    return xv[(static_cast<size_t>(m) * F + f) * T + t];
  };
  const std::vector<cplx>& cw = score_weights_;
  auto Cw = [&](int k, int m, int f) -> cplx {
    return cw[(static_cast<size_t>(k) * (M - 1) + m - 1) * F + f];
  };

  std::vector<double> lm(R);
  double lm_mean = 0.0;
  for (int64_t r = 0; r < R; ++r) {
    lm[r] = 0.5 * std::log(std::norm(xv[r]) + eps);
    lm_mean += lm[r];
  }
  lm_mean /= static_cast<double>(R);

  std::vector<double> scores(R * K);
  std::vector<double> profile(K, 0.0);
  std::vector<cplx> u(M);
  for (int f = 0; f < F; ++f)
    for (int t = 0; t < T; ++t) {
      const int64_t r = static_cast<int64_t>(f) * T + t;
      const cplx x0c = std::conj(X(0, f, t));
      for (int m = 1; m < M; ++m) {
        cplx q = X(m, f, t) * x0c;
        u[m] = q / std::sqrt(std::norm(q) + delta2);
      }
      for (int k = 0; k < K; ++k) {
        cplx s = 0.0;
        for (int m = 1; m < M; ++m) s += Cw(k, m, f) * u[m];
        scores[r * K + k] = s.real();
        profile[k] += s.real();
      }
    }
  for (double& p : profile) p /= static_cast<double>(R);

  std::vector<double> out(R * D);
  for (int f = 0; f < F; ++f)
    for (int t = 0; t < T; ++t) {
      const int64_t r = static_cast<int64_t>(f) * T + t;
      double* row = out.data() + r * D;
      for (int c = 0; c < W; ++c) {
        int tc = std::clamp(t + c - C, 0, T - 1);
        row[c] = lm[static_cast<int64_t>(f) * T + tc] - lm_mean;
      }
      for (int k = 0; k < K; ++k) {
        row[W + k] = scores[r * K + k];
        row[W + K + k] = profile[k];
      }
      row[W + 2 * K] = F > 1 ? static_cast<double>(f) / (F - 1) : 0.0;
    }

  return ad::MakeReal({R, D}, std::move(out), {x},
                      [M, F, T, K, C, W, D, R, eps, delta2, cw](ad::Node& self) {
    ad::Node* xn = self.parents[0].get();
    auto gx = xn->ComplexGrad();
    const auto& xv = xn->cval;
    const auto& G = self.real_grad;
    auto idx = [&](int m, int f, int t) {
      return (static_cast<size_t>(m) * F + f) * T + t;
    };

    // Log-magnitude columns: scatter context, then undo the mean removal.
    std::vector<double> gl(R, 0.0);
    for (int f = 0; f < F; ++f)
      for (int t = 0; t < T; ++t) {
        const int64_t r = static_cast<int64_t>(f) * T + t;
        for (int c = 0; c < W; ++c) {
          int tc = std::clamp(t + c - C, 0, T - 1);
          gl[static_cast<int64_t>(f) * T + tc] += G[r * D + c];
        }
      }
    double gmean = 0.0;
    for (double g : gl) gmean += g;
    gmean /= static_cast<double>(R);

    std::vector<double> gprofile(K, 0.0);
    for (int64_t r = 0; r < R; ++r)
      for (int k = 0; k < K; ++k) gprofile[k] += G[r * D + W + K + k];
    for (double& g : gprofile) g /= static_cast<double>(R);

    for (int f = 0; f < F; ++f)
      for (int t = 0; t < T; ++t) {
        const int64_t r = static_cast<int64_t>(f) * T + t;
        const cplx x0 = xv[idx(0, f, t)];
        gx[idx(0, f, t)] += (gl[r] - gmean) * x0 / (std::norm(x0) + eps);
        for (int m = 1; m < M; ++m) {
          const cplx xm = xv[idx(m, f, t)];
          const cplx q = xm * std::conj(x0);
          cplx gu = 0.0;
          for (int k = 0; k < K; ++k) {
            const double gs = G[r * D + W + k] + gprofile[k];
            gu += gs * std::conj(cw[(static_cast<size_t>(k) * (M - 1) + m - 1) * F + f]);
          }
          const double den = std::norm(q) + delta2;
          const double h = 1.0 / std::sqrt(den);
          const cplx gq = h * gu - (std::conj(gu) * q).real() / (den * std::sqrt(den)) * q;
          gx[idx(m, f, t)] += gq * x0;
          gx[idx(0, f, t)] += std::conj(gq) * xm;
        }
      }
  });
}

ad::Var MaskEstimator::Forward(
    const ad::Var& x, const std::map<std::string, ad::Var>& leaves) const {
  const int F = cfg_.NumBins();
  ad::Var h = Features(x);
  const int T = static_cast<int>(x.shape()[2]);
  const size_t L = cfg_.hidden.size();
  for (size_t l = 0; l <= L; ++l) {
    auto w = leaves.find("layer" + std::to_string(l) + ".w");
    auto b = leaves.find("layer" + std::to_string(l) + ".b");
    if (w == leaves.end() || b == leaves.end())
      throw std::invalid_argument("MaskEstimator: missing layer parameters");
    h = ad::Linear(h, w->second, b->second);
    if (l < L) h = ad::Relu(h);
  }
  ad::Var masks = ad::Transpose2d(ad::Softmax(h));
  return ad::Reshape(masks, {cfg_.num_sources, F, T});
}

MaskSet MaskEstimator::Estimate(const Spectrogram& x) const {
  if (x.Params().n_fft != cfg_.n_fft)
    throw std::invalid_argument("MaskEstimator: STFT size differs from network");
  return ToMaskSet(Forward(ToVar(x), params_.Leaves(false)));
}

void MaskEstimator::SaveTo(Checkpoint& ckpt) const {
  for (const auto& [k, v] : cfg_.ToMeta()) ckpt.meta[k] = v;
  ckpt.Put("sep", params_);
}

MaskEstimator MaskEstimator::FromCheckpoint(const Checkpoint& ckpt) {
  MaskEstimator net(MaskEstimatorConfig::FromMeta(ckpt.meta));
  net.SetParams(ckpt.Extract("sep"));
  return net;
}

SeparatedSet Separate(const Spectrogram& x, const MaskEstimator& net,
                      const SeparatorOptions& options) {
  return SeparateWithMasks(x, net.Estimate(x), options);
}

}  // namespace remixsep
