// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/eval/metrics.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "remixsep/signal/fft.h"

namespace remixsep {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

double Db(double num, double den) {
  if (den <= 0.0) return kMetricCapDb;
  if (num <= 0.0) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(num / den), -kMetricCapDb, kMetricCapDb);
}

// Solves G c = d with a Cholesky factorisation, adding a small ridge if the
// Gram matrix is numerically singular (band-limited references).
class GramSolver {
 public:
  explicit GramSolver(const Mat& g) {
    const double scale = std::max(g.diagonal().mean(), 1e-300);
    for (double ridge = 0.0; ; ridge = ridge == 0.0 ? 1e-12 * scale : ridge * 100) {
      Mat a = g;
      a.diagonal().array() += ridge;
      llt_.compute(a);
      if (llt_.info() == Eigen::Success || ridge > scale) break;
    }
  }
  Vec Solve(const Vec& d) const { return llt_.solve(d); }

 private:
  Eigen::LLT<Mat> llt_;
};

struct Decomposer {
  int n_refs, taps;
  int64_t len, out_len;
  int nfft;
  RealFft fft;
  std::vector<std::vector<cplx>> ref_spec;
  // corr[i][k][lag + taps - 1] = sum_u s_i(u) s_k(u + lag)
  std::vector<std::vector<std::vector<double>>> corr;

  Decomposer(const std::vector<Waveform>& refs, int taps_)
      : n_refs(static_cast<int>(refs.size())),
        taps(taps_),
        len(refs[0].Length()),
        out_len(len + taps_ - 1),
        nfft(NextPowerOfTwo(len + 2 * taps_)),
        fft(nfft) {
    for (const auto& r : refs) ref_spec.push_back(Spectrum(r.Channel(0)));
    corr.assign(n_refs, std::vector<std::vector<double>>(n_refs));
    for (int i = 0; i < n_refs; ++i)
      for (int k = 0; k < n_refs; ++k) corr[i][k] = Lags(ref_spec[i], ref_spec[k]);
  }

  std::vector<cplx> Spectrum(std::span<const double> x) const {
    std::vector<double> buf(nfft, 0.0);
    std::copy(x.begin(), x.end(), buf.begin());
    std::vector<cplx> out(fft.NumBins());
    fft.Forward(buf, out);
    return out;
  }

  // Cross-correlation at lags -(taps-1) .. taps-1.
  std::vector<double> Lags(const std::vector<cplx>& a,
                           const std::vector<cplx>& b) const {
    std::vector<cplx> prod(a.size());
    for (size_t f = 0; f < a.size(); ++f) prod[f] = std::conj(a[f]) * b[f];
    std::vector<double> full(nfft);
    fft.Inverse(prod, full);
    std::vector<double> out(2 * taps - 1);
    for (int lag = -(taps - 1); lag < taps; ++lag)
      out[lag + taps - 1] = full[(lag + nfft) % nfft];
    return out;
  }

  Mat Gram(const std::vector<int>& which) const {
    const int n = static_cast<int>(which.size());
    Mat g(n * taps, n * taps);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const auto& c = corr[which[p]][which[q]];
        for (int a = 0; a < taps; ++a)
          for (int b = 0; b < taps; ++b)
            g(p * taps + a, q * taps + b) = c[a - b + taps - 1];
      }
    return g;
  }

  // sum_{p, a} coef[p * taps + a] * s_{which[p]}(t - a), t < out_len.
  std::vector<double> Synthesize(const std::vector<int>& which, const Vec& coef) const {
    std::vector<cplx> acc(fft.NumBins(), 0.0);
    std::vector<double> buf(nfft);
    std::vector<cplx> h(fft.NumBins());
    for (size_t p = 0; p < which.size(); ++p) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (int a = 0; a < taps; ++a) buf[a] = coef(p * taps + a);
      fft.Forward(buf, h);
      const auto& s = ref_spec[which[p]];
      for (size_t f = 0; f < h.size(); ++f) acc[f] += h[f] * s[f];
    }
    fft.Inverse(acc, buf);
    return std::vector<double>(buf.begin(), buf.begin() + out_len);
  }

  Vec Rhs(const std::vector<int>& which, const std::vector<cplx>& est_spec) const {
    Vec d(which.size() * taps);
    for (size_t p = 0; p < which.size(); ++p) {
      auto l = Lags(ref_spec[which[p]], est_spec);
      for (int a = 0; a < taps; ++a) d(p * taps + a) = l[a + taps - 1];
    }
    return d;
  }
};

}  // namespace

MixtureMetrics SdrSir(const std::vector<Waveform>& estimates,
                      const std::vector<Waveform>& references) {
  const size_t n = references.size();
  if (n == 0 || estimates.size() != n)
    throw std::invalid_argument("SdrSir: estimate/reference count mismatch");
  const int64_t len = references[0].Length();
  for (const auto* set : {&estimates, &references})
    for (const auto& w : *set)
      if (w.Length() != len || w.NumChannels() < 1)
        throw std::invalid_argument("SdrSir: all signals need equal length");
  if (len < 1) throw std::invalid_argument("SdrSir: empty signals");
  const int taps = static_cast<int>(std::min<int64_t>(kDistortionTaps, len));

  Decomposer dec(references, taps);
  std::vector<bool> silent(n);
  std::vector<int> active;
  for (size_t k = 0; k < n; ++k) {
    silent[k] = references[k].ExtractChannel(0).SquaredNorm() == 0.0;
    if (!silent[k]) active.push_back(static_cast<int>(k));
  }

  // sdr[j][k], sir[j][k]: estimate j scored against reference k.
  std::vector<std::vector<double>> sdr(n, std::vector<double>(n, NAN));
  std::vector<std::vector<double>> sir(n, std::vector<double>(n, NAN));
  if (!active.empty()) {
    GramSolver all(dec.Gram(active));
    std::vector<GramSolver> single;
    for (int k : active) single.emplace_back(dec.Gram({k}));
    for (size_t j = 0; j < n; ++j) {
      auto est = estimates[j].Channel(0);
      auto spec = dec.Spectrum(est);
      std::vector<double> proj_all = dec.Synthesize(active, all.Solve(dec.Rhs(active, spec)));
      for (size_t a = 0; a < active.size(); ++a) {
        const int k = active[a];
        std::vector<double> target =
            dec.Synthesize({k}, single[a].Solve(dec.Rhs({k}, spec)));
        double e_t = 0.0, e_i = 0.0, e_d = 0.0;
        for (int64_t t = 0; t < dec.out_len; ++t) {
          const double x = t < len ? est[t] : 0.0;
          e_t += target[t] * target[t];
          e_i += (proj_all[t] - target[t]) * (proj_all[t] - target[t]);
          e_d += (x - target[t]) * (x - target[t]);
        }
        sdr[j][k] = Db(e_t, e_d);
        sir[j][k] = Db(e_t, e_i);
      }
    }
  }

  std::vector<int> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double score = 0.0;
    for (int k : active) score += sdr[perm[k]][k];
    if (best.empty() || score > best_score) {
      best = perm;
      best_score = score;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MixtureMetrics out;
  out.permutation = best;
  for (size_t k = 0; k < n; ++k) {
    SourceMetrics s;
    s.source_idx = static_cast<int>(k);
    s.valid = !silent[k];
    s.sdr_db = sdr[best[k]][k];
    s.sir_db = sir[best[k]][k];
    out.sources.push_back(s);
  }
  return out;
}

FiveNumber FiveNumberSummary(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }),
          v.end());
  if (v.empty()) throw std::invalid_argument("FiveNumberSummary: no values");
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * (v.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

double Median(std::vector<double> v) { return FiveNumberSummary(std::move(v)).median; }

std::vector<double> MetricReport::AllSdr() const {
  std::vector<double> out;
  for (const auto& m : mixtures)
    for (const auto& s : m.sources)
      if (s.valid) out.push_back(s.sdr_db);
  return out;
}

std::vector<double> MetricReport::AllSir() const {
  std::vector<double> out;
  for (const auto& m : mixtures)
    for (const auto& s : m.sources)
      if (s.valid) out.push_back(s.sir_db);
  return out;
}

namespace {
double Mean(const std::vector<double>& v) {
  if (v.empty()) return NAN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace

double MetricReport::MeanSdr() const { return Mean(AllSdr()); }
double MetricReport::MeanSir() const { return Mean(AllSir()); }

std::string FormatPermutation(const std::vector<int>& perm) {
  std::string s;
  for (size_t i = 0; i < perm.size(); ++i) s += (i ? ";" : "") + std::to_string(perm[i]);
  return s;
}

void WriteMetricsCsv(const MetricReport& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "mixture_id,source_idx,sdr_db,sir_db,permutation\n";
  char buf[64];
  for (const auto& m : report.mixtures)
    for (const auto& s : m.sources) {
      os << m.mixture_id << ',' << s.source_idx << ',';
      if (s.valid) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", s.sdr_db, s.sir_db);
        os << buf;
      } else {
        os << "nan,nan";
      }
      os << ',' << FormatPermutation(m.permutation) << '\n';
    }
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace remixsep
