// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_OBJ_OBJECTIVES_H_
#define REMIXSEP_OBJ_OBJECTIVES_H_

#include <array>
#include <utility>
#include <vector>

#include "remixsep/ad/var.h"
#include "remixsep/sep/separator.h"

namespace remixsep {

// Binary 2 x 2N matrix assigning each of the 2N second-stage outputs to one
// of the two reconstructed mixtures, N per row.
struct Assignment {
  std::vector<std::array<uint8_t, 2>> columns;  // columns[k][j]

  int NumCandidates() const { return static_cast<int>(columns.size()); }
  uint8_t operator()(int j, int k) const { return columns[k][j]; }
  // Every column sums to 1 and every row to NumCandidates() / 2.
  bool Valid() const;
  bool operator==(const Assignment& o) const { return columns == o.columns; }
};

// All valid assignments for 2N candidates, ordered lexicographically by the
// candidate indices sent to row 0; for N = 2 these are
// {01, 02, 03, 12, 13, 23}.
std::vector<Assignment> EnumerateAssignments(int num_candidates);

// Differentiable forms. Separated sets are complex [N, M, F, T]; mixtures
// and pseudo-mixtures complex [M, F, T].

// z1 = s1(x1) + s2(x2), z2 = s1(x2) + s2(x1).
std::pair<ad::Var, ad::Var> DiffCrossRemix(const ad::Var& sep1,
                                           const ad::Var& sep2);

struct DiffAssignmentResult {
  Assignment assignment;
  int index = 0;  // position in EnumerateAssignments()
  ad::Var xhat1, xhat2;
  double cost = 0.0;
};
// Candidates are the rows of sep_z1 followed by the rows of sep_z2. Picks
// the assignment minimising sum_j ||x_j - [A S]_j|| (first one on ties).
DiffAssignmentResult DiffBestAssignment(const ad::Var& sep_z1,
                                        const ad::Var& sep_z2,
                                        const ad::Var& x1, const ad::Var& x2);

// sum_j ||x_j - xhat_j||, Frobenius norm of the complex difference.
ad::Var DiffCycleLoss(const ad::Var& x1, const ad::Var& x2,
                      const ad::Var& xhat1, const ad::Var& xhat2);
// Sum of squared magnitudes over every output of every given set.
ad::Var DiffEnergyLoss(const std::vector<ad::Var>& seps);

struct DiffGanLosses {
  ad::Var d_loss, g_loss;
};
// Inputs are scalar probabilities. Logs are clamped at kGanClamp.
inline constexpr double kGanClamp = 1e-7;
DiffGanLosses DiffGanLoss(const std::vector<ad::Var>& d_real,
                          const std::vector<ad::Var>& d_fake);
// -mean log d_fake only; usable when no real batch is at hand.
ad::Var DiffGeneratorLoss(const std::vector<ad::Var>& d_fake);

struct DiffPitResult {
  ad::Var loss;
  std::vector<int> permutation;  // output perm[i] matched to truth i
};
// min over permutations of sum_i ||sep[perm[i]] - truth[i]||^2.
DiffPitResult DiffPitLoss(const ad::Var& sep, const ad::Var& truths);

// Plain-value forms over Spectrograms.

std::pair<Spectrogram, Spectrogram> CrossRemix(const SeparatedSet& sep1,
                                               const SeparatedSet& sep2);

struct AssignmentResult {
  Assignment assignment;
  int index = 0;
  Spectrogram xhat1, xhat2;
  double cost = 0.0;
};
// Exactly four candidates (two sources).
AssignmentResult BestAssignment(const std::vector<Spectrogram>& candidates,
                                const Spectrogram& x1, const Spectrogram& x2);

struct CyclePair {
  Spectrogram x1, x2, z1, z2, xhat1, xhat2;
  Assignment chosen;
};
double CycleLoss(const CyclePair& pair);
double EnergyLoss(const std::vector<SeparatedSet>& seps);

struct GanLossValues {
  double d_loss = 0.0, g_loss = 0.0;
};
GanLossValues GanLosses(const std::vector<double>& d_real,
                        const std::vector<double>& d_fake);

struct PitResult {
  double loss = 0.0;
  std::vector<int> permutation;
};
PitResult PitLoss(const SeparatedSet& sep, const std::vector<Spectrogram>& truths);

}  // namespace remixsep

#endif  // REMIXSEP_OBJ_OBJECTIVES_H_
