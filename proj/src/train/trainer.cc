// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/train/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>

#include <spdlog/spdlog.h>

#include "remixsep/ad/ops.h"
#include "remixsep/eval/evaluate.h"
#include "remixsep/nn/adam.h"
#include "remixsep/sep/diff-separator.h"
#include "remixsep/signal/stft.h"
#include "remixsep/util/parallel.h"

namespace remixsep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

uint64_t StageStream(Stage s) { return static_cast<uint64_t>(s) + 1; }

Waveform Crop(const Waveform& w, int64_t start, int64_t len) {
  Waveform out(w.NumChannels(), len, w.SampleRate());
  for (int c = 0; c < w.NumChannels(); ++c)
    for (int64_t n = 0; n < len; ++n) out(c, n) = w(c, start + n);
  return out;
}

// Separated set [N, M, F, T] -> reference channel of each output, [F, T].
std::vector<ad::Var> ReferenceChannels(const ad::Var& sep) {
  std::vector<ad::Var> out;
  for (int64_t i = 0; i < sep.shape()[0]; ++i)
    out.push_back(ad::Slice0(ad::Slice0(sep, i), 0));
  return out;
}

ad::Var SeparateVar(const MaskEstimator& net,
                    const std::map<std::string, ad::Var>& leaves,
                    const ad::Var& x, const SeparatorOptions& sep) {
  return DiffSeparateWithMasks(x, net.Forward(x, leaves), sep);
}

double MeanOf(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<std::pair<int, int>> MakePairs(int n, int count, Rng& rng) {
  if (n < 2) throw std::invalid_argument("pairing needs at least two mixtures");
  if (count <= 0) count = n / 2;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> order(n);
  while (static_cast<int>(pairs.size()) < count) {
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    for (int k = 0; k + 1 < n && static_cast<int>(pairs.size()) < count; k += 2)
      pairs.emplace_back(order[k], order[k + 1]);
  }
  return pairs;
}

void CheckDistinctPair(const ad::Var& x1, const ad::Var& x2) {
  if (!x1.Defined() || !x2.Defined())
    throw std::invalid_argument("cycle pair: undefined input");
  if (x1.node() == x2.node())
    throw std::invalid_argument("cycle pair: a mixture cannot be paired with itself");
  if (x1.shape() == x2.shape()) {
    auto a = x1.ComplexValues();
    auto b = x2.ComplexValues();
    if (std::equal(a.begin(), a.end(), b.begin(), b.end()))
      throw std::invalid_argument("cycle pair: both inputs hold the same observation");
  }
}

CycleTerms CycleForward(const MaskEstimator& net,
                        const std::map<std::string, ad::Var>& leaves,
                        const ad::Var& x1, const ad::Var& x2,
                        const SeparatorOptions& sep, const LossWeights& weights,
                        const Discriminator* disc,
                        const std::map<std::string, ad::Var>* disc_leaves) {
  CheckDistinctPair(x1, x2);
  ad::Var s1 = SeparateVar(net, leaves, x1, sep);
  ad::Var s2 = SeparateVar(net, leaves, x2, sep);
  auto [z1, z2] = DiffCrossRemix(s1, s2);
  ad::Var sz1 = SeparateVar(net, leaves, z1, sep);
  ad::Var sz2 = SeparateVar(net, leaves, z2, sep);
  DiffAssignmentResult best = DiffBestAssignment(sz1, sz2, x1, x2);

  CycleTerms out;
  out.chosen = best.assignment;
  out.cycle = DiffCycleLoss(x1, x2, best.xhat1, best.xhat2);
  out.total = ad::Scale(out.cycle, weights.cycle);
  if (weights.energy > 0.0) {
    out.energy = DiffEnergyLoss({s1, s2});
    out.total = ad::Add(out.total, ad::Scale(out.energy, weights.energy));
  }
  if (weights.gan > 0.0) {
    if (!disc || !disc_leaves)
      throw std::invalid_argument("cycle forward: gan weight set without a discriminator");
    std::vector<ad::Var> d_fake;
    for (const ad::Var* s : {&s1, &s2})
      for (const ad::Var& f : ReferenceChannels(*s)) d_fake.push_back(disc->Forward(f, *disc_leaves));
    out.gan = DiffGeneratorLoss(d_fake);
    out.total = ad::Add(out.total, ad::Scale(out.gan, weights.gan));
  }
  return out;
}

namespace {

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const Dataset& data, const Checkpoint* init)
      : cfg_(cfg), data_(data), weights_(cfg.Weights()) {
    cfg_.Validate();
    if (data_.train.empty()) throw std::invalid_argument("training split is empty");
    if (cfg_.stage == Stage::kAdversarial && data_.clean.empty())
      throw std::invalid_argument("adversarial training needs a clean pool");
    if (cfg_.stage == Stage::kRccl && data_.train.size() < 2)
      throw std::invalid_argument("cycle training needs at least two mixtures");
    if (cfg_.stage == Stage::kPit) {
      for (const auto& r : data_.train)
        if (static_cast<int>(r.images.size()) != cfg_.net.num_sources)
          throw std::invalid_argument("supervised training needs the source images of " + r.id);
    }
    crop_len_ = static_cast<int64_t>(cfg_.segment_frames - 1) * cfg_.hop;
    for (const auto& r : data_.train)
      if (r.mixture.Length() < crop_len_)
        throw std::invalid_argument("mixture " + r.id + " is shorter than one training segment");

    net_ = MaskEstimator(cfg_.net);
    net_.Initialize(cfg_.seed);
    if (NeedsDiscriminator()) {
      disc_ = Discriminator(cfg_.disc);
      disc_.Initialize(cfg_.seed);
    }

    if (!cfg_.resume_checkpoint.empty()) {
      Resume(LoadCheckpoint(cfg_.resume_checkpoint));
    } else {
      if (init) LoadInit(*init);
      else if (cfg_.stage == Stage::kRccl)
        spdlog::warn("cycle fine-tuning from scratch: it is meant to tune a well-trained separator "
                     "(pass an adversarially trained checkpoint as init)");
      adam_g_ = Adam(cfg_.SeparatorAdam(), net_.params());
      if (NeedsDiscriminator()) adam_d_ = Adam(cfg_.DiscriminatorAdam(), disc_.params());
    }

    if (!cfg_.out_dir.empty()) {
      std::filesystem::create_directories(cfg_.out_dir);
      std::string stem = (std::filesystem::path(cfg_.out_dir) / StageName(cfg_.stage)).string();
      ckpt_path_ = stem + ".ckpt";
      log_path_ = stem + "_runlog.jsonl";
      log_.Open(log_path_, resumed_);
    }
  }

  TrainResult Run() {
    log_.SetStage(StageName(cfg_.stage));
    if (!resumed_) {
      nlohmann::json h;
      h["stage"] = StageName(cfg_.stage);
      h["seed"] = cfg_.seed;
      h["config_hash"] = cfg_.Hash();
      h["epochs"] = cfg_.Epochs();
      h["train_mixtures"] = data_.train.size();
      log_.Header(h);
      Save(0);
    } else {
      nlohmann::json e;
      e["epoch"] = start_epoch_ - 1;
      e["step"] = step_;
      log_.Event("resume", e);
    }

    TrainResult result;
    if (cfg_.stage == Stage::kRccl) {
      probe_pairs_ = ProbePairs();
      result.probe_cycle_before = MeanCycleLoss(net_, data_.train, probe_pairs_, cfg_);
      nlohmann::json e;
      e["when"] = "before";
      e["cycle_loss"] = JsonNumber(result.probe_cycle_before);
      log_.Event("probe", e);
    }

    for (int epoch = start_epoch_; epoch <= cfg_.Epochs(); ++epoch) {
      auto t0 = std::chrono::steady_clock::now();
      Rng rng(cfg_.seed, {stream::kEpoch, StageStream(cfg_.stage), static_cast<uint64_t>(epoch)});
      epoch_values_.clear();
      switch (cfg_.stage) {
        case Stage::kAdversarial: EpochAdversarial(epoch, rng); break;
        case Stage::kRccl: EpochRccl(epoch, rng); break;
        case Stage::kPit: EpochPit(epoch, rng); break;
      }
      double objective = MeanOf(epoch_values_);
      result.epoch_objective.push_back(objective);

      nlohmann::json fields;
      fields["objective"] = JsonNumber(objective);
      fields["skipped_steps"] = adam_g_.skipped();
      if (ShouldValidate(epoch)) {
        EvalOptions eo;
        eo.separator = cfg_.separator;
        eo.n_fft = cfg_.n_fft;
        eo.hop = cfg_.hop;
        eo.max_mixtures = cfg_.val_mixtures;
        eo.threads = cfg_.threads;
        MetricReport rep = EvaluateSeparator(&net_, data_.val, eo);
        fields["val_sdr"] = JsonNumber(rep.MeanSdr());
        fields["val_sir"] = JsonNumber(rep.MeanSir());
        fields["val_sdr_median"] = JsonNumber(Median(rep.AllSdr()));
      }
      if (cfg_.log_wall_clock) {
        fields["wall_clock_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
      log_.Epoch(epoch, fields);
      Save(epoch);
      last_epoch_ = epoch;
    }

    if (cfg_.stage == Stage::kRccl) {
      result.probe_cycle_after = MeanCycleLoss(net_, data_.train, probe_pairs_, cfg_);
      nlohmann::json e;
      e["when"] = "after";
      e["cycle_loss"] = JsonNumber(result.probe_cycle_after);
      log_.Event("probe", e);
    }
    result.checkpoint = Snapshot(last_epoch_);
    result.log = std::move(log_);
    result.checkpoint_path = ckpt_path_;
    result.log_path = log_path_;
    return result;
  }

 private:
  bool NeedsDiscriminator() const {
    return cfg_.stage == Stage::kAdversarial || weights_.gan > 0.0;
  }
  bool TrainsDiscriminator() const { return cfg_.stage == Stage::kAdversarial; }

  bool ShouldValidate(int epoch) const {
    if (cfg_.val_mixtures <= 0 || data_.val.empty()) return false;
    return epoch % cfg_.val_every == 0 || epoch == cfg_.Epochs();
  }

  std::vector<std::pair<int, int>> ProbePairs() const {
    Rng rng(cfg_.seed, {stream::kProbe});
    int n = static_cast<int>(data_.train.size());
    return MakePairs(n, std::min(16, n / 2), rng);
  }

  ad::Var Spec(const Waveform& w) const { return ToVar(Stft(w, cfg_.n_fft, cfg_.hop)); }

  int64_t DrawStart(const Waveform& w, Rng& rng) const {
    return static_cast<int64_t>(rng.UniformInt(static_cast<uint64_t>(w.Length() - crop_len_ + 1)));
  }

  std::vector<int> EpochOrder(Rng& rng) const {
    std::vector<int> order(data_.train.size());
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    if (cfg_.mixtures_per_epoch > 0 && cfg_.mixtures_per_epoch < static_cast<int>(order.size()))
      order.resize(cfg_.mixtures_per_epoch);
    return order;
  }

  ad::Var Inject(const ad::Var& loss) const {
    if (step_ == cfg_.nan_at_step) return ad::Scale(loss, kNaN);
    return loss;
  }

  [[noreturn]] void Diverge(const std::string& what) {
    nlohmann::json e;
    e["step"] = step_;
    e["reason"] = what;
    log_.Event("diverged", e);
    std::string msg = "training diverged at step " + std::to_string(step_) + ": " + what;
    if (!ckpt_path_.empty()) msg += "; last good checkpoint " + ckpt_path_;
    throw DivergenceError(msg, step_, ckpt_path_);
  }

  void CheckLoss(const char* name, double v) {
    if (!std::isfinite(v)) Diverge(std::string("non-finite ") + name);
  }

  // Sum of per-example gradients scaled by 1/n, reduced in index order.
  static GradientMap Reduce(const std::vector<GradientMap>& per_example) {
    GradientMap g = per_example.front();
    for (size_t i = 1; i < per_example.size(); ++i) AccumulateGradients(g, per_example[i]);
    ScaleGradients(g, 1.0 / static_cast<double>(per_example.size()));
    return g;
  }

  void EpochAdversarial(int epoch, Rng& rng) {
    std::vector<int> order = EpochOrder(rng);
    const int n_src = cfg_.net.num_sources;
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg_.batch_size) {
      ++step_;
      size_t nb = std::min<size_t>(cfg_.batch_size, order.size() - b0);
      std::vector<int64_t> starts(nb);
      for (size_t i = 0; i < nb; ++i) starts[i] = DrawStart(data_.train[order[b0 + i]].mixture, rng);
      std::vector<std::pair<int, int64_t>> reals(nb * n_src);
      for (auto& r : reals) {
        r.first = static_cast<int>(rng.UniformInt(data_.clean.size()));
        r.second = DrawStart(data_.clean[r.first].audio, rng);
      }

      // Generator update against the current (frozen) discriminator.
      std::vector<GradientMap> grads(nb);
      std::vector<double> g_loss(nb), e_loss(nb, 0.0), total(nb);
      std::vector<std::vector<ad::Var>> fakes(nb);
      ParallelFor(nb, [&](size_t i) {
        auto leaves = net_.params().Leaves(true);
        auto dleaves = disc_.params().Leaves(false);
        ad::Var x = Spec(Crop(data_.train[order[b0 + i]].mixture, starts[i], crop_len_));
        ad::Var sep = SeparateVar(net_, leaves, x, cfg_.separator);
        std::vector<ad::Var> d_fake;
        for (const ad::Var& f : ReferenceChannels(sep)) {
          d_fake.push_back(disc_.Forward(f, dleaves));
          fakes[i].push_back(ad::Detach(f));
        }
        ad::Var g = DiffGeneratorLoss(d_fake);
        ad::Var loss = ad::Scale(g, weights_.gan);
        if (weights_.energy > 0.0) {
          ad::Var e = DiffEnergyLoss({sep});
          e_loss[i] = e.Item();
          loss = ad::Add(loss, ad::Scale(e, weights_.energy));
        }
        loss = Inject(loss);
        g_loss[i] = g.Item();
        total[i] = loss.Item();
        ad::Backward(loss);
        grads[i] = CollectGradients(leaves);
      }, cfg_.threads);
      double g_mean = MeanOf(g_loss), total_mean = MeanOf(total);
      CheckLoss("generator loss", total_mean);
      adam_g_.Step(net_.params(), Reduce(grads));

      // Discriminator update on clean-pool reals and the detached fakes.
      auto dleaves = disc_.params().Leaves(true);
      std::vector<ad::Var> d_real, d_fake;
      for (const auto& [idx, start] : reals) {
        ad::Var r = Spec(Crop(data_.clean[idx].audio, start, crop_len_));
        d_real.push_back(disc_.Forward(ad::Slice0(r, 0), dleaves));
      }
      for (const auto& fs : fakes)
        for (const ad::Var& f : fs) d_fake.push_back(disc_.Forward(f, dleaves));
      DiffGanLosses gl = DiffGanLoss(d_real, d_fake);
      double d_loss = gl.d_loss.Item();
      CheckLoss("discriminator loss", d_loss);
      ad::Backward(gl.d_loss);
      adam_d_.Step(disc_.params(), CollectGradients(dleaves));

      double p_real = 0.0, p_fake = 0.0;
      for (const auto& v : d_real) p_real += v.Item();
      for (const auto& v : d_fake) p_fake += v.Item();
      std::map<std::string, double> rec = {
          {"g_loss", g_mean}, {"d_loss", d_loss}, {"loss", total_mean},
          {"d_real", p_real / d_real.size()}, {"d_fake", p_fake / d_fake.size()}};
      if (weights_.energy > 0.0) rec["energy_loss"] = MeanOf(e_loss);
      log_.Step(step_, epoch, rec);
      epoch_values_.push_back(total_mean);
    }
  }

  void EpochRccl(int epoch, Rng& rng) {
    int n = static_cast<int>(data_.train.size());
    auto pairs = MakePairs(n, cfg_.pairs_per_epoch, rng);
    for (size_t b0 = 0; b0 < pairs.size(); b0 += cfg_.batch_size) {
      ++step_;
      size_t nb = std::min<size_t>(cfg_.batch_size, pairs.size() - b0);
      std::vector<std::pair<int64_t, int64_t>> starts(nb);
      for (size_t i = 0; i < nb; ++i) {
        starts[i].first = DrawStart(data_.train[pairs[b0 + i].first].mixture, rng);
        starts[i].second = DrawStart(data_.train[pairs[b0 + i].second].mixture, rng);
      }
      std::vector<GradientMap> grads(nb);
      std::vector<double> cyc(nb), en(nb, 0.0), gan(nb, 0.0), total(nb);
      ParallelFor(nb, [&](size_t i) {
        auto leaves = net_.params().Leaves(true);
        std::optional<std::map<std::string, ad::Var>> dleaves;
        if (weights_.gan > 0.0) dleaves = disc_.params().Leaves(false);
        const auto& [a, b] = pairs[b0 + i];
        ad::Var x1 = Spec(Crop(data_.train[a].mixture, starts[i].first, crop_len_));
        ad::Var x2 = Spec(Crop(data_.train[b].mixture, starts[i].second, crop_len_));
        CycleTerms t = CycleForward(net_, leaves, x1, x2, cfg_.separator, weights_,
                                    dleaves ? &disc_ : nullptr, dleaves ? &*dleaves : nullptr);
        ad::Var loss = Inject(t.total);
        cyc[i] = t.cycle.Item();
        if (t.energy.Defined()) en[i] = t.energy.Item();
        if (t.gan.Defined()) gan[i] = t.gan.Item();
        total[i] = loss.Item();
        ad::Backward(loss);
        grads[i] = CollectGradients(leaves);
      }, cfg_.threads);
      double total_mean = MeanOf(total);
      CheckLoss("cycle objective", total_mean);
      adam_g_.Step(net_.params(), Reduce(grads));
      std::map<std::string, double> rec = {{"cycle_loss", MeanOf(cyc)}, {"loss", total_mean}};
      if (weights_.energy > 0.0) rec["energy_loss"] = MeanOf(en);
      if (weights_.gan > 0.0) rec["g_loss"] = MeanOf(gan);
      log_.Step(step_, epoch, rec);
      epoch_values_.push_back(MeanOf(cyc));
    }
  }

  void EpochPit(int epoch, Rng& rng) {
    std::vector<int> order = EpochOrder(rng);
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg_.batch_size) {
      ++step_;
      size_t nb = std::min<size_t>(cfg_.batch_size, order.size() - b0);
      std::vector<int64_t> starts(nb);
      for (size_t i = 0; i < nb; ++i) starts[i] = DrawStart(data_.train[order[b0 + i]].mixture, rng);
      std::vector<GradientMap> grads(nb);
      std::vector<double> total(nb);
      ParallelFor(nb, [&](size_t i) {
        const MixtureRecord& r = data_.train[order[b0 + i]];
        auto leaves = net_.params().Leaves(true);
        ad::Var x = Spec(Crop(r.mixture, starts[i], crop_len_));
        std::vector<ad::Var> truths;
        for (const auto& img : r.images) truths.push_back(Spec(Crop(img, starts[i], crop_len_)));
        ad::Var sep = SeparateVar(net_, leaves, x, cfg_.separator);
        ad::Var loss = Inject(DiffPitLoss(sep, ad::Stack0(truths)).loss);
        total[i] = loss.Item();
        ad::Backward(loss);
        grads[i] = CollectGradients(leaves);
      }, cfg_.threads);
      double total_mean = MeanOf(total);
      CheckLoss("pit loss", total_mean);
      adam_g_.Step(net_.params(), Reduce(grads));
      log_.Step(step_, epoch, {{"pit_loss", total_mean}, {"loss", total_mean}});
      epoch_values_.push_back(total_mean);
    }
  }

  Checkpoint Snapshot(int epoch) const {
    Checkpoint ck;
    net_.SaveTo(ck);
    SeparatorOptionsToMeta(cfg_.separator, ck.meta);
    ck.meta["stage"] = StageName(cfg_.stage);
    ck.meta["stft.hop"] = std::to_string(cfg_.hop);
    ck.meta["epoch"] = std::to_string(epoch);
    ck.meta["step"] = std::to_string(step_);
    ck.meta["seed"] = std::to_string(cfg_.seed);
    ck.meta["config_hash"] = cfg_.Hash();
    ck.meta["adam_sep.step"] = std::to_string(adam_g_.step());
    ck.meta["adam_sep.skipped"] = std::to_string(adam_g_.skipped());
    ck.Put("adam_sep_m", adam_g_.first_moment());
    ck.Put("adam_sep_v", adam_g_.second_moment());
    if (NeedsDiscriminator()) {
      ck.Put("disc", disc_.params());
      if (TrainsDiscriminator()) {
        ck.meta["adam_disc.step"] = std::to_string(adam_d_.step());
        ck.meta["adam_disc.skipped"] = std::to_string(adam_d_.skipped());
        ck.Put("adam_disc_m", adam_d_.first_moment());
        ck.Put("adam_disc_v", adam_d_.second_moment());
      }
    }
    return ck;
  }

  void Save(int epoch) {
    if (ckpt_path_.empty()) return;
    SaveCheckpoint(Snapshot(epoch), ckpt_path_);
  }

  void LoadInit(const Checkpoint& init) {
    net_.SetParams(init.Extract("sep"));
    if (NeedsDiscriminator() && init.HasGroup("disc")) disc_.SetParams(init.Extract("disc"));
    else if (cfg_.stage == Stage::kRccl && weights_.gan > 0.0)
      spdlog::warn("init checkpoint has no discriminator; using a freshly initialised one");
  }

  static int64_t MetaInt(const Checkpoint& ck, const std::string& key) {
    return std::stoll(ck.Meta(key));
  }

  void Resume(const Checkpoint& ck) {
    if (ck.Meta("stage") != StageName(cfg_.stage))
      throw std::invalid_argument("resume checkpoint belongs to stage " + ck.Meta("stage"));
    if (ck.Meta("config_hash") != cfg_.Hash())
      throw std::invalid_argument("resume checkpoint was written with a different config");
    net_.SetParams(ck.Extract("sep"));
    adam_g_ = Adam(cfg_.SeparatorAdam(), net_.params());
    adam_g_.Restore(MetaInt(ck, "adam_sep.step"), ck.Extract("adam_sep_m"), ck.Extract("adam_sep_v"),
                    MetaInt(ck, "adam_sep.skipped"));
    if (NeedsDiscriminator()) {
      disc_.SetParams(ck.Extract("disc"));
      adam_d_ = Adam(cfg_.DiscriminatorAdam(), disc_.params());
      if (TrainsDiscriminator())
        adam_d_.Restore(MetaInt(ck, "adam_disc.step"), ck.Extract("adam_disc_m"),
                        ck.Extract("adam_disc_v"), MetaInt(ck, "adam_disc.skipped"));
    }
    step_ = MetaInt(ck, "step");
    start_epoch_ = static_cast<int>(MetaInt(ck, "epoch")) + 1;
    last_epoch_ = start_epoch_ - 1;
    resumed_ = true;
  }

  TrainConfig cfg_;
  const Dataset& data_;
  LossWeights weights_;
  int64_t crop_len_ = 0;
  MaskEstimator net_;
  Discriminator disc_;
  Adam adam_g_, adam_d_;
  RunLog log_;
  std::string ckpt_path_, log_path_;
  int64_t step_ = 0;
  int start_epoch_ = 1;
  int last_epoch_ = 0;
  bool resumed_ = false;
  std::vector<double> epoch_values_;
  std::vector<std::pair<int, int>> probe_pairs_;
};

}  // namespace

TrainResult Train(const TrainConfig& cfg, const Dataset& data, const Checkpoint* init) {
  Trainer t(cfg, data, init);
  return t.Run();
}

TrainResult TrainAdversarial(const TrainConfig& cfg, const Dataset& data) {
  TrainConfig c = cfg;
  c.stage = Stage::kAdversarial;
  return Train(c, data, nullptr);
}

TrainResult TrainRccl(const TrainConfig& cfg, const Dataset& data, const Checkpoint* init) {
  TrainConfig c = cfg;
  c.stage = Stage::kRccl;
  return Train(c, data, init);
}

TrainResult TrainPit(const TrainConfig& cfg, const Dataset& data) {
  TrainConfig c = cfg;
  c.stage = Stage::kPit;
  return Train(c, data, nullptr);
}

TrainResult TrainFromConfig(const TrainConfig& cfg) {
  if (cfg.manifest.empty()) throw std::invalid_argument("no dataset manifest configured");
  Dataset data = LoadDataset(cfg.manifest, cfg.net.geometry);
  std::optional<Checkpoint> init;
  if (!cfg.init_checkpoint.empty()) init = LoadCheckpoint(cfg.init_checkpoint);
  return Train(cfg, data, init ? &*init : nullptr);
}

double MeanCycleLoss(const MaskEstimator& net, const std::vector<MixtureRecord>& records,
                     const std::vector<std::pair<int, int>>& pairs, const TrainConfig& cfg) {
  if (pairs.empty()) return kNaN;
  int64_t len = static_cast<int64_t>(cfg.segment_frames - 1) * cfg.hop;
  auto centre = [&](const Waveform& w) {
    int64_t l = std::min(len, w.Length());
    return Crop(w, (w.Length() - l) / 2, l);
  };
  auto leaves = net.params().Leaves(false);
  LossWeights w;
  w.cycle = 1.0;
  std::vector<double> values(pairs.size());
  ParallelFor(pairs.size(), [&](size_t i) {
    ad::Var x1 = ToVar(Stft(centre(records[pairs[i].first].mixture), cfg.n_fft, cfg.hop));
    ad::Var x2 = ToVar(Stft(centre(records[pairs[i].second].mixture), cfg.n_fft, cfg.hop));
    values[i] = CycleForward(net, leaves, x1, x2, cfg.separator, w).cycle.Item();
  }, cfg.threads);
  return MeanOf(values);
}

Checkpoint DistillOracleMasks(const TrainConfig& cfg, const Dataset& data, int epochs) {
  cfg.Validate();
  if (data.train.empty()) throw std::invalid_argument("training split is empty");
  MaskEstimator net(cfg.net);
  net.Initialize(cfg.seed);
  Adam adam(cfg.SeparatorAdam(), net.params());
  int64_t len = static_cast<int64_t>(cfg.segment_frames - 1) * cfg.hop;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    Rng rng(cfg.seed, {stream::kDistill, static_cast<uint64_t>(epoch)});
    std::vector<int> order(data.train.size());
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      size_t nb = std::min<size_t>(cfg.batch_size, order.size() - b0);
      std::vector<int64_t> starts(nb);
      for (size_t i = 0; i < nb; ++i)
        starts[i] = static_cast<int64_t>(
            rng.UniformInt(data.train[order[b0 + i]].mixture.Length() - len + 1));
      std::vector<GradientMap> grads(nb);
      ParallelFor(nb, [&](size_t i) {
        const MixtureRecord& r = data.train[order[b0 + i]];
        Spectrogram x = Stft(Crop(r.mixture, starts[i], len), cfg.n_fft, cfg.hop);
        std::vector<Spectrogram> imgs;
        for (const auto& img : r.images) imgs.push_back(Stft(Crop(img, starts[i], len), cfg.n_fft, cfg.hop));
        // Power-ratio targets on the reference channel; they sum to one. The
        // source order is arbitrary, so the best target permutation is used.
        const int n_src = static_cast<int>(imgs.size());
        std::vector<int> perm(n_src);
        std::iota(perm.begin(), perm.end(), 0);
        auto leaves = net.params().Leaves(true);
        ad::Var masks = net.Forward(ToVar(x), leaves);
        ad::Var loss;
        do {
          MaskSet target(n_src, x.NumBins(), x.NumFrames());
          for (int f = 0; f < x.NumBins(); ++f)
            for (int t = 0; t < x.NumFrames(); ++t) {
              double sum = 0.0;
              for (const auto& s : imgs) sum += std::norm(s(0, f, t));
              for (int k = 0; k < n_src; ++k)
                target(k, f, t) = sum > 0.0 ? std::norm(imgs[perm[k]](0, f, t)) / sum : 1.0 / n_src;
            }
          ad::Var l = ad::Scale(ad::SquaredNorm(ad::Sub(masks, ToVar(target))),
                                1.0 / static_cast<double>(masks.Numel()));
          if (!loss.Defined() || l.Item() < loss.Item()) loss = l;
        } while (std::next_permutation(perm.begin(), perm.end()));
        ad::Backward(loss);
        grads[i] = CollectGradients(leaves);
      }, cfg.threads);
      GradientMap g = grads.front();
      for (size_t i = 1; i < nb; ++i) AccumulateGradients(g, grads[i]);
      ScaleGradients(g, 1.0 / static_cast<double>(nb));
      adam.Step(net.params(), g);
    }
  }
  Checkpoint ck;
  net.SaveTo(ck);
  SeparatorOptionsToMeta(cfg.separator, ck.meta);
  ck.meta["stage"] = "distill";
  ck.meta["stft.hop"] = std::to_string(cfg.hop);
  ck.meta["seed"] = std::to_string(cfg.seed);
  return ck;
}

}  // namespace remixsep
