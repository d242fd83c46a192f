// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_TRAIN_RUN_LOG_H_
#define REMIXSEP_TRAIN_RUN_LOG_H_

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace remixsep {

// JSON-lines record of a training run. Every record has a "type"; step
// records carry a strictly increasing "step".
class RunLog {
 public:
  RunLog() = default;
  // Records are mirrored to `path` as they arrive; appends when `append`.
  void Open(const std::string& path, bool append);

  // Stage name stamped on every later step record.
  void SetStage(const std::string& stage) { stage_ = stage; }
  void Header(const nlohmann::json& fields);
  void Step(int64_t step, int epoch, const std::map<std::string, double>& values);
  void Epoch(int epoch, const nlohmann::json& fields);
  void Event(const std::string& kind, const nlohmann::json& fields);

  const std::vector<nlohmann::json>& records() const { return records_; }
  int64_t last_step() const { return last_step_; }
  // Mean of `key` over the step records of one epoch; NaN if none.
  double EpochMean(int epoch, const std::string& key) const;

  static std::vector<nlohmann::json> Read(const std::string& path);

 private:
  void Append(nlohmann::json rec);

  std::vector<nlohmann::json> records_;
  int64_t last_step_ = -1;
  std::string stage_;
  std::ofstream out_;
};

// Finite doubles as numbers, everything else as the strings "nan", "inf",
// "-inf" so the file stays valid JSON.
nlohmann::json JsonNumber(double v);

}  // namespace remixsep

#endif  // REMIXSEP_TRAIN_RUN_LOG_H_
