// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/eval/evaluate.h"

#include <cstdio>
#include <stdexcept>

#include "remixsep/signal/stft.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/util/parallel.h"

namespace remixsep {

namespace {

std::vector<Waveform> ReferenceChannels(const MixtureRecord& rec) {
  std::vector<Waveform> refs;
  for (const auto& img : rec.images) refs.push_back(img.ExtractChannel(0));
  return refs;
}

size_t Count(size_t available, int max_mixtures) {
  return max_mixtures > 0 ? std::min<size_t>(available, max_mixtures) : available;
}

}  // namespace

MetricReport EvaluateSeparator(const MaskEstimator* net,
                               const std::vector<MixtureRecord>& records,
                               const EvalOptions& options) {
  if (records.empty()) throw std::invalid_argument("evaluate: no mixtures");
  if (!options.oracle && net == nullptr)
    throw std::invalid_argument("evaluate: no network given");
  const size_t n = Count(records.size(), options.max_mixtures);
  MetricReport report;
  report.mixtures.resize(n);
  ParallelFor(n, [&](size_t r) {
    const MixtureRecord& rec = records[r];
    Spectrogram x = Stft(rec.mixture, options.n_fft, options.hop);
    MaskSet masks;
    if (options.oracle) {
      std::vector<Spectrogram> images;
      for (const auto& img : rec.images) images.push_back(Stft(img, options.n_fft, options.hop));
      masks = IdealRatioMasks(images);
    } else {
      masks = net->Estimate(x);
    }
    SeparatedSet sep = SeparateWithMasks(x, masks, options.separator);
    std::vector<Waveform> est;
    for (const auto& s : sep.sources) est.push_back(Istft(s.ExtractChannel(0)));
    MixtureMetrics m = SdrSir(est, ReferenceChannels(rec));
    m.mixture_id = rec.id;
    report.mixtures[r] = std::move(m);
  }, options.threads);
  return report;
}

MetricReport EvaluateObservation(const std::vector<MixtureRecord>& records,
                                 int max_mixtures) {
  if (records.empty()) throw std::invalid_argument("evaluate: no mixtures");
  MetricReport report;
  for (size_t r = 0; r < Count(records.size(), max_mixtures); ++r) {
    const MixtureRecord& rec = records[r];
    std::vector<Waveform> est(rec.images.size(), rec.mixture.ExtractChannel(0));
    MixtureMetrics m = SdrSir(est, ReferenceChannels(rec));
    m.mixture_id = rec.id;
    report.mixtures.push_back(std::move(m));
  }
  return report;
}

SeparatorOptions SeparatorOptionsFromMeta(const std::map<std::string, std::string>& meta) {
  SeparatorOptions o;
  if (auto it = meta.find("sep.mvdr_form"); it != meta.end()) {
    if (it->second == "inverse") o.form = MvdrForm::kInverse;
    else if (it->second == "literal") o.form = MvdrForm::kLiteral;
    else throw std::runtime_error("unknown mvdr form '" + it->second + "'");
  }
  if (auto it = meta.find("sep.loading"); it != meta.end()) o.loading = std::stod(it->second);
  return o;
}

void SeparatorOptionsToMeta(const SeparatorOptions& o,
                            std::map<std::string, std::string>& meta) {
  meta["sep.mvdr_form"] = o.form == MvdrForm::kInverse ? "inverse" : "literal";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", o.loading);
  meta["sep.loading"] = buf;
}

MetricReport EvaluateCheckpoint(const std::string& checkpoint_path,
                                const std::string& manifest_path,
                                EvalOptions options) {
  Dataset data = LoadDataset(manifest_path);
  if (data.test.empty())
    throw std::runtime_error("manifest " + manifest_path + " has no test mixtures");
  if (options.oracle) return EvaluateSeparator(nullptr, data.test, options);
  Checkpoint ckpt = LoadCheckpoint(checkpoint_path);
  MaskEstimator net = MaskEstimator::FromCheckpoint(ckpt);
  options.separator = SeparatorOptionsFromMeta(ckpt.meta);
  options.n_fft = net.config().n_fft;
  if (auto it = ckpt.meta.find("stft.hop"); it != ckpt.meta.end()) options.hop = std::stoi(it->second);
  return EvaluateSeparator(&net, data.test, options);
}

}  // namespace remixsep
