// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_NN_CHECKPOINT_H_
#define REMIXSEP_NN_CHECKPOINT_H_

#include <map>
#include <string>

#include "remixsep/nn/parameters.h"

namespace remixsep {

// Binary layout, little endian:
//   "RMXSCKPT" | u32 version | u32 n_meta | n_meta x (str key, str value)
//   | u32 n_tensors | n_tensors x (str name, u32 ndim, i64 dims..., f64 data...)
// where str is u32 length + bytes. Values are stored as raw doubles so a
// save/load cycle is bit-exact.
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> meta;
  ParameterSet tensors;

  // Copies `params` in under "<prefix>/<name>".
  void Put(const std::string& prefix, const ParameterSet& params);
  // Tensors stored under "<prefix>/", prefix stripped, in stored order.
  ParameterSet Extract(const std::string& prefix) const;
  bool HasGroup(const std::string& prefix) const;
  const std::string& Meta(const std::string& key) const;
};

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
// Throws std::runtime_error on a missing file, bad magic, unknown version
// or truncated data.
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace remixsep

#endif  // REMIXSEP_NN_CHECKPOINT_H_
