// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "grad-check.h"
#include "remixsep/ad/ops.h"
#include "remixsep/obj/objectives.h"
#include "remixsep/sep/diff-separator.h"

using namespace remixsep;
using remixsep::testing::GradientError;
using remixsep::testing::RandomComplex;

namespace {

Spectrogram RandomSpec(Rng& rng, int m = 2, int bins = 5, int frames = 4) {
  StftParams p;
  p.n_fft = 2 * (bins - 1);
  p.hop = 2;
  Spectrogram s(m, frames, p);
  for (auto& v : s.Data()) v = {rng.Normal(), rng.Normal()};
  return s;
}

Spectrogram ZerosLike(const Spectrogram& s) {
  return Spectrogram(s.NumChannels(), s.NumFrames(), s.Params());
}

double MaxAbsDiff(const Spectrogram& a, const Spectrogram& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.Size(); ++i) m = std::max(m, std::abs(a.Data()[i] - b.Data()[i]));
  return m;
}

SeparatedSet Set(Spectrogram a, Spectrogram b) {
  SeparatedSet s;
  s.sources = {std::move(a), std::move(b)};
  return s;
}

// Independent brute force: every way of sending two of the four candidates
// to x1 and the rest to x2, scored with a hand-rolled Frobenius norm.
struct Brute {
  double cost;
  unsigned row0;  // bit k set: candidate k goes to x1
};

double Residual(const Spectrogram& x, const std::vector<const Spectrogram*>& parts) {
  double acc = 0.0;
  for (size_t i = 0; i < x.Size(); ++i) {
    cplx r = x.Data()[i];
    for (const auto* p : parts) r -= p->Data()[i];
    acc += std::norm(r);
  }
  return std::sqrt(acc);
}

Brute BruteForce(const std::vector<Spectrogram>& c, const Spectrogram& x1, const Spectrogram& x2) {
  Brute best{INFINITY, 0};
  for (unsigned mask = 0; mask < 16; ++mask) {
    if (std::popcount(mask) != 2) continue;
    std::vector<const Spectrogram*> p1, p2;
    for (int k = 0; k < 4; ++k) (mask >> k & 1 ? p1 : p2).push_back(&c[k]);
    double cost = Residual(x1, p1) + Residual(x2, p2);
    if (cost < best.cost) best = {cost, mask};
  }
  return best;
}

unsigned Row0(const Assignment& a) {
  unsigned m = 0;
  for (int k = 0; k < a.NumCandidates(); ++k)
    if (a(0, k)) m |= 1u << k;
  return m;
}

}  // namespace

TEST_CASE("assignment enumeration satisfies the row and column sums") {
  auto all = EnumerateAssignments(4);
  REQUIRE(all.size() == 6);
  std::vector<unsigned> rows;
  for (const auto& a : all) {
    CHECK(a.Valid());
    for (int k = 0; k < 4; ++k) CHECK(a(0, k) + a(1, k) == 1);
    for (int j = 0; j < 2; ++j) {
      int sum = 0;
      for (int k = 0; k < 4; ++k) sum += a(j, k);
      CHECK(sum == 2);
    }
    rows.push_back(Row0(a));
  }
  std::vector<unsigned> expected = {0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100};
  CHECK(rows == expected);
  CHECK_THROWS_AS(EnumerateAssignments(3), std::invalid_argument);
}

TEST_CASE("cross remix") {
  Rng rng(1);
  Spectrogram a = RandomSpec(rng), b = RandomSpec(rng), c = RandomSpec(rng), d = RandomSpec(rng);
  auto [z1, z2] = CrossRemix(Set(a, b), Set(c, d));
  CHECK(MaxAbsDiff(z1, a + d) == 0.0);
  CHECK(MaxAbsDiff(z2, c + b) == 0.0);

  auto [y1, y2] = CrossRemix(Set(a, b), Set(ZerosLike(a), ZerosLike(a)));
  CHECK(MaxAbsDiff(y1, a) == 0.0);
  CHECK(MaxAbsDiff(y2, b) == 0.0);

  CHECK(MaxAbsDiff(z1 + z2, (a + b) + (c + d)) < 1e-14);
  Spectrogram wrong = RandomSpec(rng, 2, 5, 3);
  CHECK_THROWS(CrossRemix(Set(a, b), Set(wrong, wrong)));
}

TEST_CASE("best assignment recovers exact groupings and breaks ties low") {
  Rng rng(2);
  Spectrogram a = RandomSpec(rng), b = RandomSpec(rng), c = RandomSpec(rng), d = RandomSpec(rng);
  // Candidates ordered so that x1 = a + b takes candidates 0 and 2.
  AssignmentResult r = BestAssignment({a, c, b, d}, a + b, c + d);
  CHECK(Row0(r.assignment) == 0b0101);
  CHECK(r.cost < 1e-12);
  CHECK(MaxAbsDiff(r.xhat1, a + b) < 1e-14);
  CHECK(MaxAbsDiff(r.xhat2, c + d) < 1e-14);

  AssignmentResult tie = BestAssignment({a, a, a, a}, b, c);
  CHECK(tie.index == 0);
  CHECK(Row0(tie.assignment) == 0b0011);

  CHECK_THROWS_AS(BestAssignment({a, b, c}, a, b), std::invalid_argument);
}

TEST_CASE("best assignment equals an independent enumeration") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Spectrogram> c;
    for (int k = 0; k < 4; ++k) c.push_back(RandomSpec(rng, 2, 3, 2));
    Spectrogram x1 = RandomSpec(rng, 2, 3, 2), x2 = RandomSpec(rng, 2, 3, 2);
    AssignmentResult r = BestAssignment(c, x1, x2);
    Brute b = BruteForce(c, x1, x2);
    CHECK(Row0(r.assignment) == b.row0);
    CHECK(std::abs(r.cost - b.cost) <= 1e-12 * b.cost);
  }
}

TEST_CASE("best assignment is invariant to candidate order") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Spectrogram> c;
    for (int k = 0; k < 4; ++k) c.push_back(RandomSpec(rng, 2, 3, 2));
    Spectrogram x1 = RandomSpec(rng, 2, 3, 2), x2 = RandomSpec(rng, 2, 3, 2);
    AssignmentResult r = BestAssignment(c, x1, x2);
    std::vector<int> perm = {0, 1, 2, 3};
    for (uint64_t i = 0; i < 1 + rng.UniformInt(5); ++i) std::next_permutation(perm.begin(), perm.end());
    std::vector<Spectrogram> shuffled;
    for (int k : perm) shuffled.push_back(c[k]);
    AssignmentResult s = BestAssignment(shuffled, x1, x2);
    CHECK(std::abs(s.cost - r.cost) <= 1e-12 * r.cost);
    for (int k = 0; k < 4; ++k) CHECK(s.assignment(0, k) == r.assignment(0, perm[k]));
  }
}

TEST_CASE("cycle loss") {
  Rng rng(5);
  CyclePair p;
  p.x1 = RandomSpec(rng);
  p.x2 = RandomSpec(rng);
  p.xhat1 = p.x1;
  p.xhat2 = p.x2;
  CHECK(CycleLoss(p) == 0.0);
  p.xhat1 = ZerosLike(p.x1);
  p.xhat2 = ZerosLike(p.x2);
  CHECK(CycleLoss(p) == doctest::Approx(p.x1.Norm() + p.x2.Norm()).epsilon(1e-14));
}

TEST_CASE("trivial solution is optimal for the cycle loss but not the energy loss") {
  Rng rng(6);
  Spectrogram x1 = RandomSpec(rng), x2 = RandomSpec(rng);
  Spectrogram zero = ZerosLike(x1);
  SeparatedSet s1 = Set(x1, zero), s2 = Set(x2, zero);
  auto [z1, z2] = CrossRemix(s1, s2);
  // The trivial separator maps z_j to (z_j, 0) again.
  AssignmentResult r = BestAssignment({z1, zero, z2, zero}, x1, x2);
  CyclePair p{x1, x2, z1, z2, r.xhat1, r.xhat2, r.assignment};
  CHECK(CycleLoss(p) == 0.0);
  double e = EnergyLoss({s1, s2});
  CHECK(e == x1.SquaredNorm() + x2.SquaredNorm());
  CHECK(e > 0.0);
}

TEST_CASE("energy loss") {
  Rng rng(7);
  Spectrogram a = RandomSpec(rng), b = RandomSpec(rng);
  CHECK(EnergyLoss({Set(ZerosLike(a), ZerosLike(a))}) == 0.0);
  double e = EnergyLoss({Set(a, b)});
  CHECK(e == doctest::Approx(a.SquaredNorm() + b.SquaredNorm()).epsilon(1e-14));
  CHECK(EnergyLoss({Set(2.0 * a, 2.0 * b)}) == doctest::Approx(4.0 * e).epsilon(1e-14));
}

TEST_CASE("gan losses") {
  GanLossValues mid = GanLosses({0.5, 0.5}, {0.5, 0.5});
  CHECK(mid.d_loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(mid.g_loss == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  GanLossValues perfect = GanLosses({1.0 - 1e-12}, {1e-12});
  CHECK(perfect.d_loss < 1e-10);
  GanLossValues clamped = GanLosses({0.0}, {1.0});
  CHECK(std::isfinite(clamped.d_loss));
  CHECK(std::isfinite(clamped.g_loss));
  CHECK(clamped.d_loss == doctest::Approx(-2.0 * std::log(kGanClamp)).epsilon(1e-12));

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> r(3), f(5);
    for (double& v : r) v = rng.Uniform(0.01, 0.99);
    for (double& v : f) v = rng.Uniform(0.01, 0.99);
    double lr = 0.0, lf = 0.0, lg = 0.0;
    for (double v : r) lr += std::log(v);
    for (double v : f) lf += std::log(1.0 - v), lg += std::log(v);
    GanLossValues g = GanLosses(r, f);
    CHECK(std::abs(g.d_loss - (-lr / 3 - lf / 5)) < 1e-12);
    CHECK(std::abs(g.g_loss - (-lg / 5)) < 1e-12);
  }
  CHECK_THROWS_AS(GanLosses({}, {0.5}), std::invalid_argument);
}

TEST_CASE("pit loss") {
  Rng rng(9);
  Spectrogram a = RandomSpec(rng), b = RandomSpec(rng);
  PitResult same = PitLoss(Set(a, b), {a, b});
  CHECK(same.loss == 0.0);
  CHECK(same.permutation == std::vector<int>{0, 1});
  PitResult swapped = PitLoss(Set(b, a), {a, b});
  CHECK(swapped.loss == 0.0);
  CHECK(swapped.permutation == std::vector<int>{1, 0});

  for (int trial = 0; trial < 20; ++trial) {
    Spectrogram o1 = RandomSpec(rng), o2 = RandomSpec(rng), t1 = RandomSpec(rng), t2 = RandomSpec(rng);
    double direct = (o1 - t1).SquaredNorm() + (o2 - t2).SquaredNorm();
    double crossed = (o2 - t1).SquaredNorm() + (o1 - t2).SquaredNorm();
    PitResult r = PitLoss(Set(o1, o2), {t1, t2});
    CHECK(r.loss == doctest::Approx(std::min(direct, crossed)).epsilon(1e-13));
    CHECK(PitLoss(Set(o1, o2), {t2, t1}).loss == doctest::Approx(r.loss).epsilon(1e-13));
  }
  CHECK_THROWS_AS(PitLoss(Set(a, b), {a}), std::invalid_argument);
}

TEST_CASE("differentiable losses match finite differences") {
  Rng rng(10);
  const ad::Shape sep_shape = {2, 2, 3, 2};
  const ad::Shape mix_shape = {2, 3, 2};
  for (int trial = 0; trial < 10; ++trial) {
    ad::Var s1 = RandomComplex(rng, sep_shape), s2 = RandomComplex(rng, sep_shape);
    ad::Var x1 = RandomComplex(rng, mix_shape, false), x2 = RandomComplex(rng, mix_shape, false);
    // Cycle loss with the separated pseudo-mixtures standing in for a
    // second separation pass.
    auto cycle = [&] {
      auto [z1, z2] = DiffCrossRemix(s1, s2);
      ad::Var sz1 = ad::Stack0({ad::Scale(z1, 0.6), ad::Scale(z1, 0.4)});
      ad::Var sz2 = ad::Stack0({ad::Scale(z2, 0.3), ad::Scale(z2, 0.7)});
      auto best = DiffBestAssignment(sz1, sz2, x1, x2);
      return DiffCycleLoss(x1, x2, best.xhat1, best.xhat2);
    };
    CHECK(GradientError(cycle, {s1, s2}) < 1e-6);
    CHECK(GradientError([&] { return DiffEnergyLoss({s1, s2}); }, {s1, s2}) < 1e-6);
    ad::Var truths = RandomComplex(rng, sep_shape, false);
    CHECK(GradientError([&] { return DiffPitLoss(s1, truths).loss; }, {s1}) < 1e-6);
  }
  for (int trial = 0; trial < 10; ++trial) {
    ad::Var r = ad::Var::Scalar(rng.Uniform(0.1, 0.9), true);
    ad::Var f = ad::Var::Scalar(rng.Uniform(0.1, 0.9), true);
    CHECK(GradientError([&] { return DiffGanLoss({r}, {f}).d_loss; }, {r, f}) < 1e-6);
    CHECK(GradientError([&] { return DiffGeneratorLoss({f}); }, {f}) < 1e-6);
  }
}
