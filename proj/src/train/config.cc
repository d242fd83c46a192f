// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/train/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "remixsep/util/hash.h"

namespace remixsep {

namespace {

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string FormatInts(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string Where(const std::string& key, const std::string& value) {
  return "config key '" + key + "': bad value '" + value + "'";
}

double ParseDouble(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(Where(key, v));
  }
  if (pos != v.size()) throw std::invalid_argument(Where(key, v));
  return out;
}

int64_t ParseInt(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(Where(key, v));
  }
  if (pos != v.size()) throw std::invalid_argument(Where(key, v));
  return out;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument(Where(key, v));
}

std::vector<int> ParseInts(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(ParseInt(key, item)));
  if (out.empty()) throw std::invalid_argument(Where(key, v));
  return out;
}

using Setter = std::function<void(TrainConfig&, const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> kSetters = {
      {"data.manifest", [](TrainConfig& c, const std::string& v) { c.manifest = v; }},
      {"data.out_dir", [](TrainConfig& c, const std::string& v) { c.out_dir = v; }},
      {"train.stage", [](TrainConfig& c, const std::string& v) { c.stage = ParseStage(v); }},
      {"train.epochs_al", [](TrainConfig& c, const std::string& v) { c.epochs_al = ParseInt("train.epochs_al", v); }},
      {"train.epochs_rccl", [](TrainConfig& c, const std::string& v) { c.epochs_rccl = ParseInt("train.epochs_rccl", v); }},
      {"train.epochs_pit", [](TrainConfig& c, const std::string& v) { c.epochs_pit = ParseInt("train.epochs_pit", v); }},
      {"train.batch_size", [](TrainConfig& c, const std::string& v) { c.batch_size = ParseInt("train.batch_size", v); }},
      {"train.learning_rate", [](TrainConfig& c, const std::string& v) { c.learning_rate = ParseDouble("train.learning_rate", v); }},
      {"train.disc_learning_rate", [](TrainConfig& c, const std::string& v) { c.disc_learning_rate = ParseDouble("train.disc_learning_rate", v); }},
      {"train.seed", [](TrainConfig& c, const std::string& v) { c.seed = static_cast<uint64_t>(ParseInt("train.seed", v)); }},
      {"train.segment_frames", [](TrainConfig& c, const std::string& v) { c.segment_frames = ParseInt("train.segment_frames", v); }},
      {"train.n_fft", [](TrainConfig& c, const std::string& v) { c.n_fft = ParseInt("train.n_fft", v); }},
      {"train.hop", [](TrainConfig& c, const std::string& v) { c.hop = ParseInt("train.hop", v); }},
      {"train.pairs_per_epoch", [](TrainConfig& c, const std::string& v) { c.pairs_per_epoch = ParseInt("train.pairs_per_epoch", v); }},
      {"train.mixtures_per_epoch", [](TrainConfig& c, const std::string& v) { c.mixtures_per_epoch = ParseInt("train.mixtures_per_epoch", v); }},
      {"train.val_mixtures", [](TrainConfig& c, const std::string& v) { c.val_mixtures = ParseInt("train.val_mixtures", v); }},
      {"train.val_every", [](TrainConfig& c, const std::string& v) { c.val_every = ParseInt("train.val_every", v); }},
      {"train.threads", [](TrainConfig& c, const std::string& v) { c.threads = ParseInt("train.threads", v); }},
      {"train.init_checkpoint", [](TrainConfig& c, const std::string& v) { c.init_checkpoint = v; }},
      {"train.resume_checkpoint", [](TrainConfig& c, const std::string& v) { c.resume_checkpoint = v; }},
      {"train.log_wall_clock", [](TrainConfig& c, const std::string& v) { c.log_wall_clock = ParseBool("train.log_wall_clock", v); }},
      {"loss.lambda_gan", [](TrainConfig& c, const std::string& v) { c.lambda_gan = ParseDouble("loss.lambda_gan", v); }},
      {"loss.lambda_cycle", [](TrainConfig& c, const std::string& v) { c.lambda_cycle = ParseDouble("loss.lambda_cycle", v); }},
      {"loss.lambda_energy", [](TrainConfig& c, const std::string& v) { c.lambda_energy = ParseDouble("loss.lambda_energy", v); }},
      {"separator.mvdr_form",
       [](TrainConfig& c, const std::string& v) {
         if (v == "inverse") c.separator.form = MvdrForm::kInverse;
         else if (v == "literal") c.separator.form = MvdrForm::kLiteral;
         else throw std::invalid_argument(Where("separator.mvdr_form", v));
       }},
      {"separator.loading", [](TrainConfig& c, const std::string& v) { c.separator.loading = ParseDouble("separator.loading", v); }},
      {"separator.hidden", [](TrainConfig& c, const std::string& v) { c.net.hidden = ParseInts("separator.hidden", v); }},
      {"separator.context", [](TrainConfig& c, const std::string& v) { c.net.context = ParseInt("separator.context", v); }},
      {"separator.num_sources", [](TrainConfig& c, const std::string& v) { c.net.num_sources = ParseInt("separator.num_sources", v); }},
      {"discriminator.channels", [](TrainConfig& c, const std::string& v) { c.disc.channels = ParseInts("discriminator.channels", v); }},
      {"discriminator.kernels", [](TrainConfig& c, const std::string& v) { c.disc.kernels = ParseInts("discriminator.kernels", v); }},
      {"discriminator.strides", [](TrainConfig& c, const std::string& v) { c.disc.strides = ParseInts("discriminator.strides", v); }},
      {"discriminator.leaky_slope", [](TrainConfig& c, const std::string& v) { c.disc.leaky_slope = ParseDouble("discriminator.leaky_slope", v); }},
      {"fault.nan_at_step", [](TrainConfig& c, const std::string& v) { c.nan_at_step = ParseInt("fault.nan_at_step", v); }},
  };
  return kSetters;
}

}  // namespace

std::string StageName(Stage s) {
  switch (s) {
    case Stage::kAdversarial: return "al";
    case Stage::kRccl: return "rccl";
    case Stage::kPit: return "pit";
  }
  return "unknown";
}

Stage ParseStage(const std::string& s) {
  if (s == "al") return Stage::kAdversarial;
  if (s == "rccl") return Stage::kRccl;
  if (s == "pit") return Stage::kPit;
  throw std::invalid_argument("unknown stage '" + s + "' (expected al, rccl or pit)");
}

int TrainConfig::Epochs() const {
  switch (stage) {
    case Stage::kAdversarial: return epochs_al;
    case Stage::kRccl: return epochs_rccl;
    case Stage::kPit: return epochs_pit;
  }
  return 0;
}

LossWeights TrainConfig::Weights() const {
  LossWeights w;
  if (stage == Stage::kAdversarial) w.gan = 1.0;
  if (stage == Stage::kRccl) w.cycle = 1.0;
  if (lambda_gan) w.gan = *lambda_gan;
  if (lambda_cycle) w.cycle = *lambda_cycle;
  if (lambda_energy) w.energy = *lambda_energy;
  return w;
}

AdamOptions TrainConfig::SeparatorAdam() const {
  AdamOptions o;
  o.learning_rate = learning_rate;
  return o;
}

AdamOptions TrainConfig::DiscriminatorAdam() const {
  AdamOptions o;
  o.learning_rate = disc_learning_rate;
  return o;
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid training config: " + what);
  };
  require(epochs_al >= 0 && epochs_rccl >= 0 && epochs_pit >= 0, "epochs must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate > 0.0 && disc_learning_rate > 0.0, "learning rates must be > 0");
  require(segment_frames >= 2, "segment_frames must be >= 2");
  require(n_fft >= 4 && n_fft % 2 == 0, "n_fft must be even");
  require(hop >= 1 && hop <= n_fft, "hop must lie in [1, n_fft]");
  require(pairs_per_epoch >= 0 && mixtures_per_epoch >= 0, "per-epoch counts must be >= 0");
  require(val_mixtures >= 0 && val_every >= 1, "bad validation schedule");
  require(threads >= 1, "threads must be >= 1");
  require(separator.loading >= 0.0, "separator.loading must be >= 0");
  LossWeights w = Weights();
  require(w.gan >= 0.0 && w.cycle >= 0.0 && w.energy >= 0.0, "loss weights must be >= 0");
  require(net.n_fft == n_fft, "separator n_fft must match train.n_fft");
  net.Validate();
  disc.Validate();
}

std::string TrainConfig::CanonicalText() const {
  LossWeights w = Weights();
  std::ostringstream os;
  os << "stage=" << StageName(stage) << "\n"
     << "epochs_al=" << epochs_al << "\n"
     << "epochs_rccl=" << epochs_rccl << "\n"
     << "epochs_pit=" << epochs_pit << "\n"
     << "batch_size=" << batch_size << "\n"
     << "learning_rate=" << FormatDouble(learning_rate) << "\n"
     << "disc_learning_rate=" << FormatDouble(disc_learning_rate) << "\n"
     << "lambda_gan=" << FormatDouble(w.gan) << "\n"
     << "lambda_cycle=" << FormatDouble(w.cycle) << "\n"
     << "lambda_energy=" << FormatDouble(w.energy) << "\n"
     << "seed=" << seed << "\n"
     << "segment_frames=" << segment_frames << "\n"
     << "n_fft=" << n_fft << "\n"
     << "hop=" << hop << "\n"
     << "pairs_per_epoch=" << pairs_per_epoch << "\n"
     << "mixtures_per_epoch=" << mixtures_per_epoch << "\n"
     << "val_mixtures=" << val_mixtures << "\n"
     << "val_every=" << val_every << "\n"
     << "mvdr_form=" << (separator.form == MvdrForm::kInverse ? "inverse" : "literal") << "\n"
     << "loading=" << FormatDouble(separator.loading) << "\n";
  for (const auto& [k, v] : net.ToMeta()) os << "net." << k << "=" << v << "\n";
  os << "disc.channels=" << FormatInts(disc.channels) << "\n"
     << "disc.kernels=" << FormatInts(disc.kernels) << "\n"
     << "disc.strides=" << FormatInts(disc.strides) << "\n"
     << "disc.leaky_slope=" << FormatDouble(disc.leaky_slope) << "\n"
     << "disc.log_floor=" << FormatDouble(disc.log_floor) << "\n"
     << "disc.input_scale=" << FormatDouble(disc.input_scale) << "\n";
  return os.str();
}

std::string TrainConfig::Hash() const {
  Fnv1a h;
  h.Update(CanonicalText());
  return h.HexDigest();
}

TrainConfig ParseTrainConfig(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  TrainConfig cfg;
  const auto& setters = Setters();
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw std::invalid_argument("config key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      std::string full = section + "." + key;
      auto it = setters.find(full);
      if (it == setters.end()) throw std::invalid_argument("unknown config key '" + full + "'");
      it->second(cfg, value.get_value<std::string>());
    }
  }
  cfg.net.n_fft = cfg.n_fft;
  cfg.Validate();
  return cfg;
}

TrainConfig LoadTrainConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseTrainConfig(ss.str());
}

}  // namespace remixsep
