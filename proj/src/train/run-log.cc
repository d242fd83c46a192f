// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/train/run-log.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace remixsep {

nlohmann::json JsonNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void RunLog::Open(const std::string& path, bool append) {
  out_.open(path, append ? std::ios::app : std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open run log " + path);
}

void RunLog::Append(nlohmann::json rec) {
  if (out_.is_open()) {
    out_ << rec.dump() << "\n";
    out_.flush();
  }
  records_.push_back(std::move(rec));
}

void RunLog::Header(const nlohmann::json& fields) {
  nlohmann::json rec = fields;
  rec["type"] = "header";
  Append(std::move(rec));
}

void RunLog::Step(int64_t step, int epoch, const std::map<std::string, double>& values) {
  if (step <= last_step_) {
    throw std::logic_error("run log steps must increase: " + std::to_string(step) +
                           " after " + std::to_string(last_step_));
  }
  last_step_ = step;
  nlohmann::json rec;
  rec["type"] = "step";
  rec["step"] = step;
  if (!stage_.empty()) rec["stage"] = stage_;
  rec["epoch"] = epoch;
  for (const auto& [k, v] : values) rec[k] = JsonNumber(v);
  Append(std::move(rec));
}

void RunLog::Epoch(int epoch, const nlohmann::json& fields) {
  nlohmann::json rec = fields;
  rec["type"] = "epoch";
  rec["epoch"] = epoch;
  Append(std::move(rec));
}

void RunLog::Event(const std::string& kind, const nlohmann::json& fields) {
  nlohmann::json rec = fields;
  rec["type"] = kind;
  Append(std::move(rec));
}

double RunLog::EpochMean(int epoch, const std::string& key) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records_) {
    if (r["type"] != "step" || r["epoch"] != epoch || !r.contains(key)) continue;
    if (!r[key].is_number()) return std::numeric_limits<double>::quiet_NaN();
    sum += r[key].get<double>();
    ++n;
  }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

std::vector<nlohmann::json> RunLog::Read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run log " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

}  // namespace remixsep
