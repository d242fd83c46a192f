// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/obj/objectives.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "remixsep/ad/ops.h"
#include "remixsep/sep/diff-separator.h"

namespace remixsep {

namespace {

void CheckSeparated(const ad::Var& s, const char* op) {
  if (!s.Defined() || !s.IsComplex() || s.shape().size() != 4)
    throw std::invalid_argument(std::string(op) + ": expects complex [N,M,F,T]");
}

void CheckMixture(const ad::Var& x, const char* op) {
  if (!x.Defined() || !x.IsComplex() || x.shape().size() != 3)
    throw std::invalid_argument(std::string(op) + ": expects complex [M,F,T]");
}

// ||x - sum_k a_k c_k|| without building a graph.
double ResidualNorm(std::span<const cplx> x,
                    const std::vector<std::span<const cplx>>& picked) {
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    cplx r = x[i];
    for (const auto& c : picked) r -= c[i];
    acc += std::norm(r);
  }
  return std::sqrt(acc);
}

ad::Var StackSpectrograms(const std::vector<Spectrogram>& s) {
  std::vector<ad::Var> parts;
  for (const auto& x : s) parts.push_back(ToVar(x));
  return ad::Stack0(parts);
}

}  // namespace

bool Assignment::Valid() const {
  const int n = NumCandidates();
  if (n == 0 || n % 2) return false;
  int row0 = 0, row1 = 0;
  for (const auto& c : columns) {
    if (c[0] > 1 || c[1] > 1 || c[0] + c[1] != 1) return false;
    row0 += c[0];
    row1 += c[1];
  }
  return row0 == n / 2 && row1 == n / 2;
}

std::vector<Assignment> EnumerateAssignments(int num_candidates) {
  if (num_candidates < 2 || num_candidates % 2 || num_candidates > 16)
    throw std::invalid_argument("EnumerateAssignments: need an even count in [2, 16]");
  const int half = num_candidates / 2;
  std::vector<Assignment> out;
  std::vector<int> pick(half);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Assignment a;
    a.columns.assign(num_candidates, {0, 1});
    for (int k : pick) a.columns[k] = {1, 0};
    out.push_back(std::move(a));
    // Next combination in lexicographic order.
    int i = half - 1;
    while (i >= 0 && pick[i] == num_candidates - half + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < half; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::pair<ad::Var, ad::Var> DiffCrossRemix(const ad::Var& sep1,
                                           const ad::Var& sep2) {
  CheckSeparated(sep1, "CrossRemix");
  CheckSeparated(sep2, "CrossRemix");
  if (sep1.shape() != sep2.shape() || sep1.shape()[0] != 2)
    throw std::invalid_argument("CrossRemix: expects two equal-shaped 2-source sets");
  ad::Var z1 = ad::Add(ad::Slice0(sep1, 0), ad::Slice0(sep2, 1));
  ad::Var z2 = ad::Add(ad::Slice0(sep2, 0), ad::Slice0(sep1, 1));
  return {z1, z2};
}

DiffAssignmentResult DiffBestAssignment(const ad::Var& sep_z1,
                                        const ad::Var& sep_z2,
                                        const ad::Var& x1, const ad::Var& x2) {
  CheckSeparated(sep_z1, "BestAssignment");
  CheckSeparated(sep_z2, "BestAssignment");
  CheckMixture(x1, "BestAssignment");
  CheckMixture(x2, "BestAssignment");
  if (sep_z1.shape() != sep_z2.shape() || sep_z1.shape()[0] != 2)
    throw std::invalid_argument("BestAssignment: expects four candidates");
  const ad::Shape inner(sep_z1.shape().begin() + 1, sep_z1.shape().end());
  if (x1.shape() != inner || x2.shape() != inner)
    throw std::invalid_argument("BestAssignment: mixture shape differs from candidates");

  std::vector<ad::Var> cand = {ad::Slice0(sep_z1, 0), ad::Slice0(sep_z1, 1),
                               ad::Slice0(sep_z2, 0), ad::Slice0(sep_z2, 1)};
  const auto all = EnumerateAssignments(4);
  int best = -1;
  double best_cost = 0.0;
  for (size_t a = 0; a < all.size(); ++a) {
    double cost = 0.0;
    for (int j = 0; j < 2; ++j) {
      std::vector<std::span<const cplx>> picked;
      for (int k = 0; k < 4; ++k)
        if (all[a](j, k)) picked.push_back(cand[k].ComplexValues());
      cost += ResidualNorm((j == 0 ? x1 : x2).ComplexValues(), picked);
    }
    if (best < 0 || cost < best_cost) {
      best = static_cast<int>(a);
      best_cost = cost;
    }
  }
  DiffAssignmentResult r;
  r.assignment = all[best];
  r.index = best;
  r.cost = best_cost;
  for (int j = 0; j < 2; ++j) {
    ad::Var sum;
    for (int k = 0; k < 4; ++k) {
      if (!r.assignment(j, k)) continue;
      sum = sum.Defined() ? ad::Add(sum, cand[k]) : cand[k];
    }
    (j == 0 ? r.xhat1 : r.xhat2) = sum;
  }
  return r;
}

ad::Var DiffCycleLoss(const ad::Var& x1, const ad::Var& x2,
                      const ad::Var& xhat1, const ad::Var& xhat2) {
  return ad::Add(ad::Norm(ad::Sub(x1, xhat1)), ad::Norm(ad::Sub(x2, xhat2)));
}

ad::Var DiffEnergyLoss(const std::vector<ad::Var>& seps) {
  if (seps.empty()) throw std::invalid_argument("EnergyLoss: no outputs");
  ad::Var total;
  for (const auto& s : seps) {
    ad::Var e = ad::SquaredNorm(s);
    total = total.Defined() ? ad::Add(total, e) : e;
  }
  return total;
}

namespace {

ad::Var MeanLog(const std::vector<ad::Var>& ps, bool complement) {
  ad::Var total;
  for (const auto& p : ps) {
    if (p.IsComplex() || p.Numel() != 1)
      throw std::invalid_argument("GanLoss: expects real scalar probabilities");
    ad::Var v = complement ? ad::Affine(p, -1.0, 1.0) : p;
    ad::Var l = ad::ClampedLog(v, kGanClamp);
    total = total.Defined() ? ad::Add(total, l) : l;
  }
  return ad::Scale(total, 1.0 / static_cast<double>(ps.size()));
}

}  // namespace

DiffGanLosses DiffGanLoss(const std::vector<ad::Var>& d_real,
                          const std::vector<ad::Var>& d_fake) {
  if (d_real.empty() || d_fake.empty())
    throw std::invalid_argument("GanLoss: empty batch");
  DiffGanLosses out;
  out.d_loss = ad::Scale(ad::Add(MeanLog(d_real, false), MeanLog(d_fake, true)), -1.0);
  out.g_loss = ad::Scale(MeanLog(d_fake, false), -1.0);
  return out;
}

ad::Var DiffGeneratorLoss(const std::vector<ad::Var>& d_fake) {
  if (d_fake.empty()) throw std::invalid_argument("GanLoss: empty batch");
  return ad::Scale(MeanLog(d_fake, false), -1.0);
}

DiffPitResult DiffPitLoss(const ad::Var& sep, const ad::Var& truths) {
  CheckSeparated(sep, "PitLoss");
  CheckSeparated(truths, "PitLoss");
  if (sep.shape() != truths.shape())
    throw std::invalid_argument("PitLoss: output/truth count or shape mismatch");
  const int n = static_cast<int>(sep.shape()[0]);
  const size_t block = static_cast<size_t>(sep.Numel() / n);
  auto sv = sep.ComplexValues(), tv = truths.ComplexValues();
  // Pairwise squared distances, then the best permutation.
  std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (size_t e = 0; e < block; ++e)
        acc += std::norm(sv[i * block + e] - tv[j * block + e]);
      d[i * n + j] = acc;
    }
  std::vector<int> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = 0.0;
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += d[perm[i] * n + i];
    if (best.empty() || c < best_cost) {
      best = perm;
      best_cost = c;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  DiffPitResult r;
  r.permutation = best;
  for (int i = 0; i < n; ++i) {
    ad::Var e = ad::SquaredNorm(ad::Sub(ad::Slice0(sep, best[i]), ad::Slice0(truths, i)));
    r.loss = r.loss.Defined() ? ad::Add(r.loss, e) : e;
  }
  return r;
}

std::pair<Spectrogram, Spectrogram> CrossRemix(const SeparatedSet& sep1,
                                               const SeparatedSet& sep2) {
  if (sep1.sources.size() != 2 || sep2.sources.size() != 2)
    throw std::invalid_argument("CrossRemix: expects two sources per set");
  const StftParams& p = sep1.sources[0].Params();
  auto [z1, z2] = DiffCrossRemix(StackSpectrograms(sep1.sources),
                                 StackSpectrograms(sep2.sources));
  return {ToSpectrogram(z1, p), ToSpectrogram(z2, p)};
}

AssignmentResult BestAssignment(const std::vector<Spectrogram>& candidates,
                                const Spectrogram& x1, const Spectrogram& x2) {
  if (candidates.size() != 4)
    throw std::invalid_argument("BestAssignment: expects exactly four candidates");
  ad::Var a = StackSpectrograms({candidates[0], candidates[1]});
  ad::Var b = StackSpectrograms({candidates[2], candidates[3]});
  auto r = DiffBestAssignment(a, b, ToVar(x1), ToVar(x2));
  AssignmentResult out;
  out.assignment = r.assignment;
  out.index = r.index;
  out.cost = r.cost;
  out.xhat1 = ToSpectrogram(r.xhat1, x1.Params());
  out.xhat2 = ToSpectrogram(r.xhat2, x2.Params());
  return out;
}

double CycleLoss(const CyclePair& pair) {
  return DiffCycleLoss(ToVar(pair.x1), ToVar(pair.x2), ToVar(pair.xhat1),
                       ToVar(pair.xhat2)).Item();
}

double EnergyLoss(const std::vector<SeparatedSet>& seps) {
  std::vector<ad::Var> v;
  for (const auto& s : seps) v.push_back(StackSpectrograms(s.sources));
  return DiffEnergyLoss(v).Item();
}

GanLossValues GanLosses(const std::vector<double>& d_real,
                        const std::vector<double>& d_fake) {
  std::vector<ad::Var> r, f;
  for (double p : d_real) r.push_back(ad::Var::Scalar(p));
  for (double p : d_fake) f.push_back(ad::Var::Scalar(p));
  auto l = DiffGanLoss(r, f);
  return {l.d_loss.Item(), l.g_loss.Item()};
}

PitResult PitLoss(const SeparatedSet& sep, const std::vector<Spectrogram>& truths) {
  if (sep.sources.size() != truths.size() || truths.empty())
    throw std::invalid_argument("PitLoss: output/truth count mismatch");
  auto r = DiffPitLoss(StackSpectrograms(sep.sources), StackSpectrograms(truths));
  return {r.loss.Item(), r.permutation};
}

}  // namespace remixsep
