// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIM_DATASET_H_
#define REMIXSEP_SIM_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "remixsep/sim/array-sim.h"

namespace remixsep {

struct DatasetSpec {
  int n_train = 256;
  int n_val = 32;
  int n_test = 32;
  // Unpaired clean utterances for the discriminator; 0 means n_train.
  int n_clean = 0;
  uint64_t seed = 0;
  double duration_s = 3.0;
  double sample_rate = 16000.0;
  int num_sources = 2;
  double source_distance = 1.0;

  void Validate() const;
};

struct CleanUtterance {
  std::string id;
  uint64_t seed = 0;
  Waveform audio;
};

struct Dataset {
  ArrayGeometry geometry;
  std::vector<MixtureRecord> train, val, test;
  std::vector<CleanUtterance> clean;
};

// One manifest line.
struct ManifestEntry {
  std::string id;
  std::string split;
  std::string mixture_path;
  std::vector<std::string> source_paths;
  std::vector<double> directions;
  uint64_t seed = 0;
  double distance = 1.0;
};

// Builds the dataset in memory. A pure function of the spec.
Dataset GenerateDataset(const DatasetSpec& spec,
                        const ArrayGeometry& g = DefaultGeometry());

// Writes mixtures, per-source images and the clean pool as float WAV files
// under out_dir, plus manifest.jsonl (mixtures) and clean_pool.jsonl.
// Returns the manifest entries. Throws std::runtime_error if out_dir cannot
// be created or written.
std::vector<ManifestEntry> WriteDataset(const Dataset& data,
                                        const std::string& out_dir);

std::vector<ManifestEntry> GenerateDatasetToDisk(const DatasetSpec& spec,
                                                 const std::string& out_dir);

std::vector<ManifestEntry> ReadManifest(const std::string& manifest_path);

// Loads the dataset referenced by a manifest (and the clean pool listed in
// clean_pool.jsonl next to it, when present).
Dataset LoadDataset(const std::string& manifest_path,
                    const ArrayGeometry& g = DefaultGeometry());

}  // namespace remixsep

#endif  // REMIXSEP_SIM_DATASET_H_
