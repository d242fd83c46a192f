// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_TRAIN_SWEEP_H_
#define REMIXSEP_TRAIN_SWEEP_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "remixsep/eval/metrics.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/train/config.h"

namespace remixsep {

// "al", "al+rccl", "pit".
const std::vector<std::string>& SweepMethods();

struct SweepRow {
  std::string method;
  uint64_t seed = 0;
  // Means over every test source; NaN when the run failed.
  double sdr = 0.0;
  double sir = 0.0;
  bool ok = true;
  std::string error;
  std::string param_hash;
  // al+rccl only: probe cycle loss before and after fine-tuning.
  double cycle_before = 0.0;
  double cycle_after = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // seed-major, methods in request order
  std::map<std::string, FiveNumber> sdr_summary, sir_summary;
  std::string config_hash;

  std::vector<double> Sdr(const std::string& method) const;
};

struct SweepOptions {
  std::vector<uint64_t> seeds;
  std::vector<std::string> methods = {"al", "al+rccl", "pit"};
  // Test mixtures scored per run; 0 means all.
  int max_test_mixtures = 0;
  // When non-empty, per-seed run directories and the CSV/JSON reports go
  // here.
  std::string out_dir;
};

// Runs every method for every seed from `base` (stage and seed replaced).
// A failing run is logged and flagged in its row; the others continue.
// Throws std::invalid_argument for fewer than two distinct seeds or an
// unknown method.
SweepReport SeedSweep(const TrainConfig& base, const Dataset& data,
                      const SweepOptions& options);

// stability.csv {method,seed,sdr,sir}, summary_sdr.csv and summary_sir.csv
// {method,min,q1,median,q3,max}, run_meta.json.
void WriteSweepReport(const SweepReport& report, const SweepOptions& options,
                      const std::string& out_dir);

std::vector<uint64_t> ParseSeedList(const std::string& s);
std::vector<std::string> ParseMethodList(const std::string& s);

}  // namespace remixsep

#endif  // REMIXSEP_TRAIN_SWEEP_H_
