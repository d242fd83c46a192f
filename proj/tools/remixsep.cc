// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// remixsep command-line tool: dataset generation, training stages,
// evaluation and seed sweeps.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
// 3 training divergence.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "remixsep/eval/evaluate.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/train/config.h"
#include "remixsep/train/sweep.h"
#include "remixsep/train/trainer.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDiverged = 3;

struct GenDataArgs {
  remixsep::DatasetSpec spec;
  std::string out;
};

struct TrainArgs {
  std::string stage, config, init, resume, out;
  std::optional<uint64_t> seed;
};

struct EvalArgs {
  std::string checkpoint, manifest, out, form;
  bool oracle = false;
  int max_mixtures = 0;
  int threads = 1;
};

struct SweepArgs {
  std::string config, seeds, methods = "al,al+rccl,pit", out;
  int max_test = 0;
};

int RunGenData(const GenDataArgs& a) {
  auto entries = remixsep::GenerateDatasetToDisk(a.spec, a.out);
  spdlog::info("wrote {} mixtures to {}", entries.size(),
               (std::filesystem::path(a.out) / "manifest.jsonl").string());
  return kExitOk;
}

int RunTrain(const TrainArgs& a) {
  remixsep::TrainConfig cfg = remixsep::LoadTrainConfig(a.config);
  cfg.stage = remixsep::ParseStage(a.stage);
  if (!a.init.empty()) cfg.init_checkpoint = a.init;
  if (!a.resume.empty()) cfg.resume_checkpoint = a.resume;
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (a.seed) cfg.seed = *a.seed;
  cfg.Validate();
  if (cfg.out_dir.empty()) throw std::invalid_argument("no output directory (data.out_dir or --out)");
  spdlog::info("stage {} seed {} config {}", remixsep::StageName(cfg.stage), cfg.seed, cfg.Hash());
  remixsep::TrainResult r = remixsep::TrainFromConfig(cfg);
  spdlog::info("checkpoint {}", r.checkpoint_path);
  spdlog::info("run log {}", r.log_path);
  if (cfg.stage == remixsep::Stage::kRccl)
    spdlog::info("probe cycle loss {:.6g} -> {:.6g}", r.probe_cycle_before, r.probe_cycle_after);
  return kExitOk;
}

int RunEval(const EvalArgs& a) {
  remixsep::EvalOptions opts;
  opts.oracle = a.oracle;
  opts.max_mixtures = a.max_mixtures;
  opts.threads = a.threads;
  if (a.form == "literal") opts.separator.form = remixsep::MvdrForm::kLiteral;
  if (!a.oracle && a.checkpoint.empty())
    throw std::invalid_argument("--checkpoint is required unless --oracle is given");
  remixsep::MetricReport rep = remixsep::EvaluateCheckpoint(a.checkpoint, a.manifest, opts);
  remixsep::WriteMetricsCsv(rep, a.out);
  spdlog::info("{} mixtures: mean SDR {:.3f} dB, mean SIR {:.3f} dB -> {}", rep.mixtures.size(),
               rep.MeanSdr(), rep.MeanSir(), a.out);
  return kExitOk;
}

int RunSweep(const SweepArgs& a) {
  remixsep::TrainConfig cfg = remixsep::LoadTrainConfig(a.config);
  remixsep::SweepOptions opts;
  opts.seeds = remixsep::ParseSeedList(a.seeds);
  opts.methods = remixsep::ParseMethodList(a.methods);
  opts.max_test_mixtures = a.max_test;
  opts.out_dir = a.out;
  if (cfg.manifest.empty()) throw std::invalid_argument("config has no data.manifest");
  remixsep::Dataset data = remixsep::LoadDataset(cfg.manifest, cfg.net.geometry);
  remixsep::SweepReport rep = remixsep::SeedSweep(cfg, data, opts);
  for (const auto& m : opts.methods) {
    const auto& s = rep.sdr_summary.at(m);
    spdlog::info("{}: SDR median {:.3f} dB, range [{:.3f}, {:.3f}]", m, s.median, s.min, s.max);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised multichannel speech separation: adversarial and remix-cycle training"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Simulate the mixture corpus and clean pool");
  gen_cmd->add_option("--n-train", gen.spec.n_train, "Training mixtures")->capture_default_str();
  gen_cmd->add_option("--n-val", gen.spec.n_val, "Validation mixtures")->capture_default_str();
  gen_cmd->add_option("--n-test", gen.spec.n_test, "Test mixtures")->capture_default_str();
  gen_cmd->add_option("--n-clean", gen.spec.n_clean, "Clean utterances (0: as many as training mixtures)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.spec.seed, "Dataset seed")->capture_default_str();
  gen_cmd->add_option("--duration", gen.spec.duration_s, "Utterance length in seconds")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Run one training stage");
  train_cmd->add_option("--stage", tr.stage, "al, rccl or pit")
      ->required()
      ->check(CLI::IsMember({"al", "rccl", "pit"}));
  train_cmd->add_option("--config", tr.config, "Run config file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--init", tr.init, "Initial checkpoint (stage-1 result for rccl)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--resume", tr.resume, "Continue a run from its checkpoint")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out, "Output directory (overrides data.out_dir)");
  train_cmd->add_option("--seed", tr.seed, "Training seed (overrides train.seed)");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on the test split");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint to evaluate")->check(CLI::ExistingFile);
  eval_cmd->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev.out, "Metric CSV path")->required();
  eval_cmd->add_flag("--oracle", ev.oracle, "Use ideal ratio masks instead of a network");
  eval_cmd->add_option("--mvdr-form", ev.form, "Beamformer form for --oracle: inverse or literal")
      ->check(CLI::IsMember({"inverse", "literal"}));
  eval_cmd->add_option("--max-mixtures", ev.max_mixtures, "Score only the first N test mixtures")
      ->capture_default_str();
  eval_cmd->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and score several methods over several seeds");
  sweep_cmd->add_option("--config", sw.config, "Run config file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--seeds", sw.seeds, "Comma-separated seeds (at least two)")->required();
  sweep_cmd->add_option("--methods", sw.methods, "Comma-separated subset of al, al+rccl, pit")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sw.out, "Report directory")->required();
  sweep_cmd->add_option("--max-test", sw.max_test, "Score only the first N test mixtures")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return RunGenData(gen);
    if (*train_cmd) return RunTrain(tr);
    if (*eval_cmd) return RunEval(ev);
    if (*sweep_cmd) return RunSweep(sw);
  } catch (const remixsep::DivergenceError& e) {
    spdlog::error("{}", e.what());
    return kExitDiverged;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
