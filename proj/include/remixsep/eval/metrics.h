// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_EVAL_METRICS_H_
#define REMIXSEP_EVAL_METRICS_H_

#include <string>
#include <vector>

#include "remixsep/signal/waveform.h"

namespace remixsep {

inline constexpr double kMetricCapDb = 60.0;
inline constexpr int kDistortionTaps = 512;

struct SourceMetrics {
  int source_idx = 0;  // reference index
  double sdr_db = 0.0;
  double sir_db = 0.0;
  // False when the reference is silent; the values are then NaN.
  bool valid = true;
};

struct MixtureMetrics {
  std::string mixture_id;
  // permutation[k] = estimate matched to reference k.
  std::vector<int> permutation;
  std::vector<SourceMetrics> sources;
};

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
// Quartiles by linear interpolation between order statistics. NaNs are
// dropped; throws std::invalid_argument if nothing is left.
FiveNumber FiveNumberSummary(std::vector<double> v);
double Median(std::vector<double> v);

struct MetricReport {
  std::vector<MixtureMetrics> mixtures;

  std::vector<double> AllSdr() const;
  std::vector<double> AllSir() const;
  double MeanSdr() const;
  double MeanSir() const;
};

// Projection-based SDR/SIR of single-channel estimates against references
// (time-invariant 512-tap distortion filters), choosing the permutation that
// maximises the mean SDR. Values are clipped to +-kMetricCapDb.
MixtureMetrics SdrSir(const std::vector<Waveform>& estimates,
                      const std::vector<Waveform>& references);

// One row per (mixture, reference source):
// mixture_id,source_idx,sdr_db,sir_db,permutation
void WriteMetricsCsv(const MetricReport& report, const std::string& path);
std::string FormatPermutation(const std::vector<int>& perm);

}  // namespace remixsep

#endif  // REMIXSEP_EVAL_METRICS_H_
