// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "remixsep/ad/ops.h"
#include "remixsep/nn/adam.h"
#include "remixsep/obj/objectives.h"
#include "remixsep/sep/diff-separator.h"
#include "remixsep/signal/stft.h"
#include "remixsep/train/sweep.h"
#include "remixsep/train/trainer.h"

using namespace remixsep;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("remixsep-test-train-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const Dataset& SmallData() {
  static const Dataset data = [] {
    DatasetSpec spec;
    spec.n_train = 8;
    spec.n_val = 2;
    spec.n_test = 2;
    spec.seed = 4;
    spec.duration_s = 0.5;
    return GenerateDataset(spec);
  }();
  return data;
}

TrainConfig SmallConfig(Stage stage, const std::string& out_dir = "") {
  TrainConfig c;
  c.stage = stage;
  c.epochs_al = c.epochs_rccl = c.epochs_pit = 2;
  c.batch_size = 4;
  c.seed = 3;
  c.n_fft = c.net.n_fft = 128;
  c.hop = 32;
  c.segment_frames = 16;
  c.net.hidden = {8};
  c.disc.channels = {4, 1};
  c.disc.kernels = {3, 3};
  c.disc.strides = {2, 1};
  c.val_mixtures = 2;
  c.pairs_per_epoch = 8;
  c.out_dir = out_dir;
  c.log_wall_clock = false;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  TrainConfig d = ParseTrainConfig("");
  CHECK(d.stage == Stage::kAdversarial);
  CHECK(d.batch_size == 8);
  CHECK(d.learning_rate == 5e-4);
  CHECK(d.Weights().gan == 1.0);
  CHECK(d.Weights().cycle == 0.0);

  TrainConfig c = ParseTrainConfig(
      "[train]\nstage = rccl\nepochs_rccl = 3\nseed = 9\nn_fft = 256\nhop = 64\n"
      "[loss]\nlambda_energy = 0.5\n[separator]\nmvdr_form = literal\n[data]\nmanifest = m.jsonl\n");
  CHECK(c.stage == Stage::kRccl);
  CHECK(c.Epochs() == 3);
  CHECK(c.seed == 9);
  CHECK(c.net.n_fft == 256);
  CHECK(c.Weights().cycle == 1.0);
  CHECK(c.Weights().energy == 0.5);
  CHECK(c.Weights().gan == 0.0);
  CHECK(c.separator.form == MvdrForm::kLiteral);
  CHECK(c.manifest == "m.jsonl");

  // Paths and threads do not enter the hash; results-affecting fields do.
  TrainConfig c2 = c;
  c2.manifest = "other";
  c2.threads = 4;
  c2.out_dir = "x";
  CHECK(c2.Hash() == c.Hash());
  c2.seed = 10;
  CHECK(c2.Hash() != c.Hash());
  CHECK(ParseTrainConfig("[train]\nseed = 9\n").Hash() ==
        ParseTrainConfig("[train]\nseed=9\n").Hash());

  CHECK_THROWS_AS(ParseTrainConfig("[train]\nsede = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(ParseTrainConfig("[bogus]\nx = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(ParseTrainConfig("seed = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(ParseTrainConfig("[train]\nstage = gan\n"), std::invalid_argument);
  CHECK_THROWS_AS(ParseTrainConfig("[train]\nbatch_size = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(ParseTrainConfig("[train]\nlearning_rate = abc\n"), std::invalid_argument);
  CHECK_THROWS_AS(LoadTrainConfig("/nonexistent/cfg.ini"), std::exception);
}

TEST_CASE("run log steps are strictly increasing") {
  fs::path dir = TempDir("runlog");
  RunLog log;
  log.Open((dir / "log.jsonl").string(), false);
  log.SetStage("al");
  log.Header({{"seed", 1}});
  log.Step(1, 1, {{"loss", 2.0}});
  log.Step(2, 1, {{"loss", 4.0}, {"g", NAN}});
  CHECK_THROWS_AS(log.Step(2, 1, {{"loss", 1.0}}), std::logic_error);
  CHECK_THROWS_AS(log.Step(1, 2, {{"loss", 1.0}}), std::logic_error);
  CHECK(log.EpochMean(1, "loss") == 3.0);
  CHECK(std::isnan(log.EpochMean(2, "loss")));
  auto recs = RunLog::Read((dir / "log.jsonl").string());
  REQUIRE(recs.size() == 3);
  CHECK(recs[1]["stage"] == "al");
  CHECK(recs[2]["g"] == "nan");
  fs::remove_all(dir);
}

TEST_CASE("pairs are distinct and self pairs are rejected") {
  Rng rng(1);
  auto pairs = MakePairs(9, 20, rng);
  CHECK(pairs.size() == 20);
  for (auto [a, b] : pairs) {
    CHECK(a != b);
    CHECK(a >= 0);
    CHECK(b < 9);
  }
  CHECK_THROWS_AS(MakePairs(1, 1, rng), std::invalid_argument);

  const Dataset& data = SmallData();
  ad::Var x = ToVar(Stft(data.train[0].mixture, 128, 32));
  ad::Var y = ToVar(Stft(data.train[1].mixture, 128, 32));
  CHECK_THROWS_AS(CheckDistinctPair(x, x), std::invalid_argument);
  CHECK_THROWS_AS(CheckDistinctPair(x, ToVar(Stft(data.train[0].mixture, 128, 32))),
                  std::invalid_argument);
  CHECK_NOTHROW(CheckDistinctPair(x, y));
}

TEST_CASE("cycle forward matches the plain-value pipeline") {
  const Dataset& data = SmallData();
  TrainConfig cfg = SmallConfig(Stage::kRccl);
  MaskEstimator net(cfg.net);
  net.Initialize(2);
  Spectrogram s1 = Stft(data.train[0].mixture, 128, 32), s2 = Stft(data.train[1].mixture, 128, 32);
  auto leaves = net.params().Leaves(false);
  CycleTerms t = CycleForward(net, leaves, ToVar(s1), ToVar(s2), cfg.separator, cfg.Weights());

  SeparatedSet a = Separate(s1, net, cfg.separator), b = Separate(s2, net, cfg.separator);
  auto [z1, z2] = CrossRemix(a, b);
  SeparatedSet sa = Separate(z1, net, cfg.separator), sb = Separate(z2, net, cfg.separator);
  std::vector<Spectrogram> cands = sa.sources;
  cands.insert(cands.end(), sb.sources.begin(), sb.sources.end());
  AssignmentResult best = BestAssignment(cands, s1, s2);
  CyclePair pair;
  pair.x1 = s1;
  pair.x2 = s2;
  pair.xhat1 = best.xhat1;
  pair.xhat2 = best.xhat2;
  const double expected = CycleLoss(pair);
  CHECK(t.chosen == best.assignment);
  CHECK(t.cycle.Item() == doctest::Approx(expected).epsilon(1e-9));
  CHECK(t.total.Item() == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS_AS(CycleForward(net, leaves, ToVar(s1), ToVar(s1), cfg.separator, cfg.Weights()),
                  std::invalid_argument);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Dataset& data = SmallData();
  fs::path d1 = TempDir("det1"), d2 = TempDir("det2");
  TrainConfig c1 = SmallConfig(Stage::kAdversarial, d1.string());
  TrainConfig c2 = SmallConfig(Stage::kAdversarial, d2.string());
  c2.threads = 3;
  TrainResult r1 = Train(c1, data), r2 = Train(c2, data);
  CHECK(ReadFile(r1.checkpoint_path) == ReadFile(r2.checkpoint_path));
  CHECK(ReadFile(r1.log_path) == ReadFile(r2.log_path));
  CHECK(r1.epoch_objective.size() == 2);

  TrainConfig c3 = SmallConfig(Stage::kAdversarial);
  c3.seed = 4;
  TrainResult r3 = Train(c3, data);
  CHECK(r3.checkpoint.Extract("sep").Hash() != r1.checkpoint.Extract("sep").Hash());
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("divergence keeps the last checkpoint and resume continues exactly") {
  const Dataset& data = SmallData();
  for (Stage stage : {Stage::kAdversarial, Stage::kPit, Stage::kRccl}) {
    CAPTURE(StageName(stage));
    fs::path full = TempDir("full"), cut = TempDir("cut");
    TrainResult ref = Train(SmallConfig(stage, full.string()), data);

    // Two steps per epoch: step 3 is the first of epoch 2.
    TrainConfig bad = SmallConfig(stage, cut.string());
    bad.nan_at_step = 3;
    bool threw = false;
    try {
      Train(bad, data);
    } catch (const DivergenceError& e) {
      threw = true;
      CHECK(e.step() == 3);
      CHECK(e.checkpoint() == (cut / (StageName(stage) + ".ckpt")).string());
    }
    REQUIRE(threw);
    Checkpoint kept = LoadCheckpoint((cut / (StageName(stage) + ".ckpt")).string());
    CHECK(kept.Meta("epoch") == "1");
    CHECK(kept.Meta("step") == "2");
    auto recs = RunLog::Read((cut / (StageName(stage) + "_runlog.jsonl")).string());
    CHECK(recs.back()["type"] == "diverged");

    TrainConfig resume = SmallConfig(stage, cut.string());
    resume.resume_checkpoint = (cut / (StageName(stage) + ".ckpt")).string();
    TrainResult res = Train(resume, data);
    CHECK(res.checkpoint.tensors.Hash() == ref.checkpoint.tensors.Hash());
    CHECK(res.checkpoint.meta == ref.checkpoint.meta);

    TrainConfig other = resume;
    other.learning_rate = 1e-3;
    CHECK_THROWS_AS(Train(other, data), std::invalid_argument);
    fs::remove_all(full);
    fs::remove_all(cut);
  }
}

TEST_CASE("discriminator learns to separate clean speech from mixtures") {
  const Dataset& data = SmallData();
  DiscriminatorConfig cfg;
  Discriminator d(cfg);
  d.Initialize(1);
  Adam adam(AdamOptions{}, d.params());
  std::vector<ad::Var> reals, fakes;
  for (size_t i = 0; i < 4; ++i) {
    reals.push_back(ad::Slice0(ToVar(Stft(data.clean[i].audio, 512, 128)), 0));
    fakes.push_back(ad::Slice0(ToVar(Stft(data.train[i].mixture, 512, 128)), 0));
  }
  double d_loss = 0.0;
  int steps = 0;
  for (; steps < 200; ++steps) {
    auto leaves = d.params().Leaves(true);
    std::vector<ad::Var> pr, pf;
    for (auto& r : reals) pr.push_back(d.Forward(r, leaves));
    for (auto& f : fakes) pf.push_back(d.Forward(f, leaves));
    DiffGanLosses gl = DiffGanLoss(pr, pf);
    d_loss = gl.d_loss.Item();
    if (d_loss < 0.3) break;
    ad::Backward(gl.d_loss);
    adam.Step(d.params(), CollectGradients(leaves));
  }
  CHECK(d_loss < 0.3);
}

TEST_CASE("cycle fine-tuning from a good separator stays near its start") {
  const Dataset& data = SmallData();
  TrainConfig cfg = SmallConfig(Stage::kRccl);
  Checkpoint init = DistillOracleMasks(cfg, data, 30);
  cfg.epochs_rccl = 5;
  TrainResult r = Train(cfg, data, &init);
  CHECK(std::isfinite(r.probe_cycle_before));
  CHECK(r.probe_cycle_after < 1.5 * r.probe_cycle_before);
  for (double v : r.epoch_objective) CHECK(std::isfinite(v));
}

TEST_CASE("pit loss vanishes on exact images") {
  const Dataset& data = SmallData();
  const MixtureRecord& r = data.train[0];
  std::vector<ad::Var> imgs;
  for (const auto& w : r.images) imgs.push_back(ToVar(Stft(w, 128, 32)));
  ad::Var truths = ad::Stack0(imgs);
  CHECK(DiffPitLoss(truths, truths).loss.Item() == 0.0);
  ad::Var swapped = ad::Stack0({imgs[1], imgs[0]});
  DiffPitResult p = DiffPitLoss(swapped, truths);
  CHECK(p.loss.Item() == 0.0);
  CHECK(p.permutation == std::vector<int>{1, 0});
}

TEST_CASE("seed sweep") {
  const Dataset& data = SmallData();
  TrainConfig base = SmallConfig(Stage::kAdversarial);
  base.epochs_al = base.epochs_rccl = base.epochs_pit = 1;
  SweepOptions opts;
  opts.seeds = {1};
  CHECK_THROWS_AS(SeedSweep(base, data, opts), std::invalid_argument);
  opts.seeds = {2, 2};
  CHECK_THROWS_AS(SeedSweep(base, data, opts), std::invalid_argument);
  opts.seeds = {1, 2};
  opts.methods = {"al", "bogus"};
  CHECK_THROWS_AS(SeedSweep(base, data, opts), std::invalid_argument);

  fs::path dir = TempDir("sweep");
  opts.methods = SweepMethods();
  opts.out_dir = dir.string();
  SweepReport rep = SeedSweep(base, data, opts);
  WriteSweepReport(rep, opts, dir.string());
  REQUIRE(rep.rows.size() == 6);
  std::set<std::string> hashes;
  for (const auto& row : rep.rows) {
    CHECK(row.ok);
    CHECK(std::isfinite(row.sdr));
    hashes.insert(row.param_hash);
  }
  CHECK(hashes.size() == 6);
  CHECK(rep.Sdr("pit").size() == 2);
  std::string csv = ReadFile(dir / "stability.csv");
  CHECK(csv.rfind("method,seed,sdr,sir\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(ReadFile(dir / "summary_sdr.csv").rfind("method,min,q1,median,q3,max\n", 0) == 0);
  CHECK(fs::exists(dir / "run_meta.json"));
  CHECK(ParseSeedList("1,2,5") == std::vector<uint64_t>{1, 2, 5});
  CHECK(ParseMethodList("al,pit") == std::vector<std::string>{"al", "pit"});
  fs::remove_all(dir);
}
