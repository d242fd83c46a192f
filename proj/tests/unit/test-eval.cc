// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "remixsep/eval/evaluate.h"
#include "remixsep/eval/metrics.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/util/rng.h"

using namespace remixsep;
namespace fs = std::filesystem;

namespace {

constexpr double kFs = 16000.0;

Waveform Noise(Rng& rng, int64_t n) {
  Waveform w(1, n, kFs);
  for (double& v : w.Data()) v = rng.Normal();
  return w;
}

// Hann-tapered so that distant tones stay orthogonal at every lag the
// distortion filters can reach.
Waveform TaperedSine(double freq, int64_t n) {
  Waveform w(1, n, kFs);
  for (int64_t i = 0; i < n; ++i) {
    double taper = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    w(0, i) = taper * std::sin(2.0 * std::numbers::pi * freq * i / kFs);
  }
  return w;
}

Waveform Scaled(Waveform w, double g) {
  w *= g;
  return w;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("remixsep-test-eval-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("perfect estimates hit the cap") {
  Rng rng(1);
  Waveform r1 = Noise(rng, 8000), r2 = Noise(rng, 8000);
  MixtureMetrics m = SdrSir({r1, r2}, {r1, r2});
  for (const auto& s : m.sources) {
    CHECK(s.valid);
    CHECK(s.sdr_db == kMetricCapDb);
    CHECK(s.sir_db == kMetricCapDb);
  }
}

TEST_CASE("projection absorbs a gain") {
  Rng rng(2);
  Waveform r1 = Noise(rng, 8000), r2 = Noise(rng, 8000);
  Waveform e1 = r1 + Scaled(Noise(rng, 8000), 0.3) + Scaled(r2, 0.2);
  Waveform e2 = r2 + Scaled(Noise(rng, 8000), 0.3);
  MixtureMetrics a = SdrSir({e1, e2}, {r1, r2});
  MixtureMetrics b = SdrSir({Scaled(e1, 0.5), e2}, {r1, r2});
  CHECK(a.sources[0].sdr_db < 30.0);
  CHECK(b.sources[0].sdr_db == doctest::Approx(a.sources[0].sdr_db).epsilon(1e-9));
  CHECK(b.sources[0].sir_db == doctest::Approx(a.sources[0].sir_db).epsilon(1e-9));
}

TEST_CASE("closed form on orthogonal sinusoids") {
  // With only target and interference present SDR and SIR both equal the
  // energy ratio.
  const int64_t n = 16000;
  Waveform r1 = TaperedSine(440.0, n), r2 = TaperedSine(2230.0, n);
  for (double g : {0.1, 0.3, 0.7}) {
    Waveform e1 = r1 + Scaled(r2, g);
    MixtureMetrics m = SdrSir({e1, r2}, {r1, r2});
    double expected = 10.0 * std::log10(r1.SquaredNorm() / (g * g * r2.SquaredNorm()));
    CHECK(std::abs(m.sources[0].sir_db - expected) < 0.01);
    CHECK(std::abs(m.sources[0].sdr_db - expected) < 0.01);
  }
}

TEST_CASE("mixture as estimate scores near 0 dB") {
  Rng rng(3);
  Waveform r1 = Noise(rng, 16000), r2 = Noise(rng, 16000);
  Waveform mix = r1 + r2;
  MixtureMetrics m = SdrSir({mix, mix}, {r1, r2});
  for (const auto& s : m.sources) {
    CHECK(std::abs(s.sir_db) < 1.0);
    CHECK(std::abs(s.sdr_db) < 1.0);
  }
}

TEST_CASE("shuffling the estimates changes only the permutation") {
  Rng rng(4);
  Waveform r1 = Noise(rng, 8000), r2 = Noise(rng, 8000);
  Waveform e1 = r1 + Scaled(r2, 0.3), e2 = r2 + Scaled(Noise(rng, 8000), 0.5);
  MixtureMetrics a = SdrSir({e1, e2}, {r1, r2});
  MixtureMetrics b = SdrSir({e2, e1}, {r1, r2});
  CHECK(a.permutation == std::vector<int>{0, 1});
  CHECK(b.permutation == std::vector<int>{1, 0});
  for (int k = 0; k < 2; ++k) {
    CHECK(a.sources[k].sdr_db == b.sources[k].sdr_db);
    CHECK(a.sources[k].sir_db == b.sources[k].sir_db);
  }
}

TEST_CASE("metrics never exceed the cap and silent references are flagged") {
  Rng rng(5);
  Waveform r1 = Noise(rng, 4000);
  Waveform silent(1, 4000, kFs);
  MixtureMetrics m = SdrSir({r1, Noise(rng, 4000)}, {r1, silent});
  CHECK(m.sources[0].valid);
  CHECK(m.sources[0].sdr_db <= kMetricCapDb);
  CHECK_FALSE(m.sources[1].valid);
  CHECK(std::isnan(m.sources[1].sdr_db));
  CHECK_THROWS_AS(SdrSir({r1}, {r1, r1}), std::invalid_argument);
  CHECK_THROWS_AS(SdrSir({r1, Noise(rng, 3000)}, {r1, r1}), std::invalid_argument);
}

TEST_CASE("five-number summary") {
  FiveNumber f = FiveNumberSummary({5, 1, 4, 2, 3});
  CHECK(f.min == 1);
  CHECK(f.q1 == 2);
  CHECK(f.median == 3);
  CHECK(f.q3 == 4);
  CHECK(f.max == 5);
  FiveNumber g = FiveNumberSummary({1, 2, 3, 4, NAN});
  CHECK(g.median == doctest::Approx(2.5));
  CHECK(g.q1 == doctest::Approx(1.75));
  CHECK_THROWS_AS(FiveNumberSummary({NAN}), std::invalid_argument);
}

TEST_CASE("evaluation over a manifest") {
  fs::path dir = TempDir("manifest");
  DatasetSpec spec;
  spec.n_train = 2;
  spec.n_val = 1;
  spec.n_test = 3;
  spec.seed = 11;
  spec.duration_s = 1.0;
  GenerateDatasetToDisk(spec, dir.string());
  const std::string manifest = (dir / "manifest.jsonl").string();

  EvalOptions oracle;
  oracle.oracle = true;
  MetricReport rep = EvaluateCheckpoint("", manifest, oracle);
  REQUIRE(rep.mixtures.size() == 3);
  Dataset data = LoadDataset(manifest);
  MetricReport obs = EvaluateObservation(data.test);
  for (size_t i = 0; i < rep.mixtures.size(); ++i)
    for (int k = 0; k < 2; ++k)
      CHECK(rep.mixtures[i].sources[k].sir_db > obs.mixtures[i].sources[k].sir_db);

  WriteMetricsCsv(rep, (dir / "a.csv").string());
  WriteMetricsCsv(EvaluateCheckpoint("", manifest, oracle), (dir / "b.csv").string());
  std::string a = ReadFile((dir / "a.csv").string());
  CHECK(a == ReadFile((dir / "b.csv").string()));
  CHECK(a.rfind("mixture_id,source_idx,sdr_db,sir_db,permutation\n", 0) == 0);

  // A manifest without test mixtures is an error, not an empty report.
  {
    std::istringstream all(ReadFile(manifest));
    std::ofstream kept(dir / "no-test.jsonl");
    std::string line;
    while (std::getline(all, line))
      if (line.find("\"split\":\"test\"") == std::string::npos) kept << line << "\n";
  }
  CHECK_THROWS(EvaluateCheckpoint("", (dir / "no-test.jsonl").string(), oracle));
  CHECK_THROWS(EvaluateCheckpoint("", (dir / "missing.jsonl").string(), oracle));
  fs::remove_all(dir);
}
