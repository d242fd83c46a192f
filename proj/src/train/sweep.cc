// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/train/sweep.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "remixsep/eval/evaluate.h"
#include "remixsep/train/run-log.h"
#include "remixsep/train/trainer.h"

namespace remixsep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string FormatValue(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void Score(SweepRow& row, const Checkpoint& ck, const TrainConfig& cfg,
           const Dataset& data, const SweepOptions& opts) {
  MaskEstimator net = MaskEstimator::FromCheckpoint(ck);
  EvalOptions eo;
  eo.separator = cfg.separator;
  eo.n_fft = cfg.n_fft;
  eo.hop = cfg.hop;
  eo.max_mixtures = opts.max_test_mixtures;
  eo.threads = cfg.threads;
  MetricReport rep = EvaluateSeparator(&net, data.test, eo);
  row.sdr = rep.MeanSdr();
  row.sir = rep.MeanSir();
  row.param_hash = net.params().Hash();
}

// NaN entries are failed runs; a method with no successful run gets an
// all-NaN summary.
FiveNumber Summary(const std::vector<double>& v) {
  if (std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); }))
    return FiveNumber{kNaN, kNaN, kNaN, kNaN, kNaN};
  return FiveNumberSummary(v);
}

void Fail(SweepRow& row, const std::exception& e) {
  spdlog::error("sweep: {} seed {} failed: {}", row.method, row.seed, e.what());
  row.ok = false;
  row.error = e.what();
  row.sdr = row.sir = kNaN;
}

}  // namespace

const std::vector<std::string>& SweepMethods() {
  static const std::vector<std::string> kMethods = {"al", "al+rccl", "pit"};
  return kMethods;
}

std::vector<double> SweepReport::Sdr(const std::string& method) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.method == method && r.ok) out.push_back(r.sdr);
  return out;
}

SweepReport SeedSweep(const TrainConfig& base, const Dataset& data, const SweepOptions& opts) {
  std::set<uint64_t> distinct(opts.seeds.begin(), opts.seeds.end());
  if (distinct.size() < 2 || distinct.size() != opts.seeds.size())
    throw std::invalid_argument("a seed sweep needs at least two distinct seeds");
  if (opts.methods.empty()) throw std::invalid_argument("a seed sweep needs at least one method");
  for (const auto& m : opts.methods)
    if (std::find(SweepMethods().begin(), SweepMethods().end(), m) == SweepMethods().end())
      throw std::invalid_argument("unknown sweep method '" + m + "'");
  if (data.test.empty()) throw std::invalid_argument("a seed sweep needs a test split");
  base.Validate();

  auto wants = [&](const std::string& m) {
    return std::find(opts.methods.begin(), opts.methods.end(), m) != opts.methods.end();
  };

  SweepReport report;
  report.config_hash = base.Hash();
  for (uint64_t seed : opts.seeds) {
    TrainConfig cfg = base;
    cfg.seed = seed;
    cfg.init_checkpoint.clear();
    cfg.resume_checkpoint.clear();
    std::string run_dir;
    if (!opts.out_dir.empty())
      run_dir = (std::filesystem::path(opts.out_dir) / ("seed_" + std::to_string(seed))).string();
    cfg.out_dir = run_dir;

    std::map<std::string, SweepRow> rows;
    for (const auto& m : opts.methods) {
      rows[m].method = m;
      rows[m].seed = seed;
    }

    if (wants("al") || wants("al+rccl")) {
      Checkpoint al;
      bool al_ok = true;
      try {
        cfg.stage = Stage::kAdversarial;
        al = Train(cfg, data).checkpoint;
        if (wants("al")) Score(rows["al"], al, cfg, data, opts);
      } catch (const std::exception& e) {
        al_ok = false;
        for (const char* m : {"al", "al+rccl"})
          if (wants(m)) Fail(rows[m], e);
      }
      if (al_ok && wants("al+rccl")) {
        try {
          cfg.stage = Stage::kRccl;
          TrainResult r = Train(cfg, data, &al);
          rows["al+rccl"].cycle_before = r.probe_cycle_before;
          rows["al+rccl"].cycle_after = r.probe_cycle_after;
          Score(rows["al+rccl"], r.checkpoint, cfg, data, opts);
        } catch (const std::exception& e) {
          Fail(rows["al+rccl"], e);
        }
      }
    }
    if (wants("pit")) {
      try {
        cfg.stage = Stage::kPit;
        Score(rows["pit"], Train(cfg, data).checkpoint, cfg, data, opts);
      } catch (const std::exception& e) {
        Fail(rows["pit"], e);
      }
    }
    for (const auto& m : opts.methods) {
      const SweepRow& r = rows[m];
      if (r.ok) spdlog::info("sweep: {} seed {}: sdr {:.3f} dB, sir {:.3f} dB", m, seed, r.sdr, r.sir);
      report.rows.push_back(r);
    }
  }
  for (const auto& m : opts.methods) {
    std::vector<double> sdr, sir;
    for (const auto& r : report.rows) {
      if (r.method != m) continue;
      sdr.push_back(r.sdr);
      sir.push_back(r.sir);
    }
    report.sdr_summary[m] = Summary(sdr);
    report.sir_summary[m] = Summary(sir);
  }
  if (!opts.out_dir.empty()) WriteSweepReport(report, opts, opts.out_dir);
  return report;
}

void WriteSweepReport(const SweepReport& report, const SweepOptions& opts,
                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(std::filesystem::path(out_dir) / name);
    if (!out) throw std::runtime_error("cannot write " + name + " in " + out_dir);
    return out;
  };
  {
    std::ofstream out = open("stability.csv");
    out << "method,seed,sdr,sir\n";
    for (const auto& r : report.rows)
      out << r.method << "," << r.seed << "," << FormatValue(r.sdr) << "," << FormatValue(r.sir) << "\n";
  }
  auto write_summary = [&](const std::string& name, const std::map<std::string, FiveNumber>& s) {
    std::ofstream out = open(name);
    out << "method,min,q1,median,q3,max\n";
    for (const auto& m : opts.methods) {
      const FiveNumber& f = s.at(m);
      out << m << "," << FormatValue(f.min) << "," << FormatValue(f.q1) << "," << FormatValue(f.median)
          << "," << FormatValue(f.q3) << "," << FormatValue(f.max) << "\n";
    }
  };
  write_summary("summary_sdr.csv", report.sdr_summary);
  write_summary("summary_sir.csv", report.sir_summary);

  nlohmann::json meta;
  meta["config_hash"] = report.config_hash;
  meta["seeds"] = opts.seeds;
  meta["methods"] = opts.methods;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["ok"] = r.ok;
    j["param_hash"] = r.param_hash;
    if (!r.ok) j["error"] = r.error;
    if (r.method == "al+rccl" && r.ok) {
      j["cycle_before"] = JsonNumber(r.cycle_before);
      j["cycle_after"] = JsonNumber(r.cycle_after);
    }
    runs.push_back(j);
  }
  meta["runs"] = runs;
  std::ofstream out = open("run_meta.json");
  out << meta.dump(2) << "\n";
}

std::vector<uint64_t> ParseSeedList(const std::string& s) {
  std::vector<uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad seed '" + item + "'");
    }
    if (pos != item.size() || item.empty() || item[0] == '-')
      throw std::invalid_argument("bad seed '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> ParseMethodList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (std::find(SweepMethods().begin(), SweepMethods().end(), item) == SweepMethods().end())
      throw std::invalid_argument("unknown method '" + item + "' (expected al, al+rccl or pit)");
    out.push_back(item);
  }
  return out;
}

}  // namespace remixsep
