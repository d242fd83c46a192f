// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "remixsep/signal/fft.h"
#include "remixsep/sim/dataset.h"
#include "remixsep/util/rng.h"

using namespace remixsep;

namespace {

constexpr double kPi = std::numbers::pi;

double Sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

// Power-weighted mean frequency of a single-channel signal.
double SpectralCentroid(const Waveform& w) {
  const int n = NextPowerOfTwo(w.Length());
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::copy(w.Channel(0).begin(), w.Channel(0).end(), buf.begin());
  std::vector<cplx> spec(fft.NumBins());
  fft.Forward(buf, spec);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < fft.NumBins(); ++k) {
    double p = std::norm(spec[k]);
    num += p * k * w.SampleRate() / n;
    den += p;
  }
  return num / den;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("steering vector entries") {
  ArrayGeometry g = DefaultGeometry();
  CHECK(g.NumMics() == 4);
  SteeringVector front = ComputeSteeringVector(g, 0.0, 512, 16000);
  for (const cplx& v : front.values) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);

  // At 90 degrees adjacent mics differ by 2 pi f d / c; 1 kHz is bin 32.
  SteeringVector side = ComputeSteeringVector(g, 90.0, 512, 16000);
  const double expected = 2 * kPi * 1000.0 * 0.03 / 343.0;
  CHECK(expected == doctest::Approx(0.5495).epsilon(1e-3));
  for (int m = 0; m + 1 < 4; ++m) {
    double dphi = std::arg(side(m + 1, 32) / side(m, 32));
    CHECK(std::abs(std::abs(dphi) - expected) < 1e-12);
  }
  for (double dir : DirectionGrid()) {
    SteeringVector a = ComputeSteeringVector(g, dir, 512, 16000);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(a(m, 0) - cplx(1.0, 0.0)) < 1e-15);
    for (const cplx& v : a.values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(ComputeSteeringVector(g, 95.0, 512, 16000), std::invalid_argument);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS(ArrayGeometry::Linear(1, 0.03).Validate(), std::invalid_argument);
  ArrayGeometry g = ArrayGeometry::Linear(2, 0.03);
  g.mic_positions[1] = g.mic_positions[0];
  CHECK_THROWS_AS(g.Validate(), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry::Linear(3, 0.03, 0.0).Validate(), std::invalid_argument);
}

TEST_CASE("synthetic source is deterministic, unit RMS and speech-band") {
  Waveform a = SynthSource(42, 1.0, 16000), b = SynthSource(42, 1.0, 16000);
  REQUIRE(a.Length() == 16000);
  for (int64_t n = 0; n < a.Length(); ++n) REQUIRE(a(0, n) == b(0, n));
  CHECK(std::sqrt(a.SquaredNorm() / a.Length()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(SynthSource(43, 1.0, 16000)(0, 100) != a(0, 100));
  double lo = 1e9, hi = 0.0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    double c = SpectralCentroid(SynthSource(seed, 1.0, 16000));
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  MESSAGE("centroid range " << lo << " .. " << hi << " Hz");
  CHECK(lo > 100.0);
  CHECK(hi < 4000.0);
}

TEST_CASE("broadside source reaches every mic identically") {
  Waveform s = SynthSource(1, 0.5, 16000);
  SceneSpec spec;
  spec.source_directions = {0.0};
  MixtureRecord rec = RenderScene(spec, {s}, DefaultGeometry());
  for (int m = 1; m < 4; ++m)
    for (int64_t n = 0; n < s.Length(); ++n)
      REQUIRE(std::abs(rec.mixture(m, n) - rec.mixture(0, n)) < 1e-12);
}

TEST_CASE("mixture is the exact sum of its images") {
  Waveform s1 = SynthSource(1, 0.5, 16000), s2 = SynthSource(2, 0.5, 16000);
  SceneSpec spec;
  spec.source_directions = {-45.0, 30.0};
  MixtureRecord rec = RenderScene(spec, {s1, s2}, DefaultGeometry());
  for (int m = 0; m < 4; ++m)
    for (int64_t n = 0; n < s1.Length(); ++n)
      REQUIRE(rec.mixture(m, n) == rec.images[0](m, n) + rec.images[1](m, n));
  Waveform silent(1, s2.Length(), 16000);
  MixtureRecord muted = RenderScene(spec, {s1, silent}, DefaultGeometry());
  for (size_t i = 0; i < muted.mixture.Data().size(); ++i)
    REQUIRE(muted.mixture.Data()[i] == rec.images[0].Data()[i]);
}

TEST_CASE("rendered image matches a sinc fractional-delay line") {
  // Band-limited, tapered test signal so both methods see no edge effects.
  const int64_t len = 2048;
  Waveform s(1, len, 16000);
  Rng rng(11);
  for (int k = 0; k < 6; ++k) {
    double f = rng.Uniform(100, 3000), ph = rng.Uniform(0, 2 * kPi);
    for (int64_t n = 0; n < len; ++n) s(0, n) += std::cos(2 * kPi * f * n / 16000 + ph);
  }
  for (int64_t n = 0; n < len; ++n)
    s(0, n) *= std::pow(std::sin(kPi * n / (len - 1)), 4);
  ArrayGeometry g = DefaultGeometry();
  for (double dir : {-90.0, -30.0, 60.0}) {
    Waveform img = RenderImage(s, g, dir);
    for (int m = 0; m < 4; ++m) {
      const double d = PropagationDelay(g, m, dir) * 16000;
      double num = 0.0, den = 0.0;
      for (int64_t n = 256; n < len - 256; ++n) {
        double ref = 0.0;
        for (int64_t k = 0; k < len; ++k) ref += s(0, k) * Sinc(n - d - k);
        num += (img(m, n) - ref) * (img(m, n) - ref);
        den += ref * ref;
      }
      CHECK(std::sqrt(num / den) < 1e-3);
    }
  }
}

TEST_CASE("scene validation") {
  Waveform s = SynthSource(1, 0.1, 16000);
  SceneSpec spec;
  spec.source_directions = {15.0, 15.0};
  CHECK_THROWS_AS(RenderScene(spec, {s, s}, DefaultGeometry()), std::invalid_argument);
  spec.source_directions = {15.0, 20.0};
  CHECK_THROWS_AS(RenderScene(spec, {s, s}, DefaultGeometry()), std::invalid_argument);
  spec.source_directions = {15.0, 30.0};
  CHECK_THROWS_AS(RenderScene(spec, {s}, DefaultGeometry()), std::invalid_argument);
  CHECK_THROWS_AS(RenderScene(spec, {s, SynthSource(2, 0.2, 16000)}, DefaultGeometry()),
                  std::invalid_argument);
}

TEST_CASE("dataset generation and manifests") {
  DatasetSpec spec;
  spec.n_train = 8;
  spec.n_val = 2;
  spec.n_test = 2;
  spec.seed = 7;
  spec.duration_s = 0.25;
  const auto root = std::filesystem::temp_directory_path() / "remixsep_ds_test";
  std::filesystem::remove_all(root);
  auto entries = GenerateDatasetToDisk(spec, (root / "a").string());
  CHECK(entries.size() == 12);
  GenerateDatasetToDisk(spec, (root / "b").string());
  CHECK(ReadFile(root / "a" / "manifest.jsonl") == ReadFile(root / "b" / "manifest.jsonl"));
  CHECK(ReadFile(root / "a" / "clean_pool.jsonl") == ReadFile(root / "b" / "clean_pool.jsonl"));

  std::set<std::string> ids;
  for (const auto& e : entries) {
    ids.insert(e.id);
    REQUIRE(e.directions.size() == 2);
    CHECK(e.directions[0] != e.directions[1]);
    for (double d : e.directions) {
      CHECK(std::abs(d) <= 90.0);
      CHECK(std::fmod(d, 15.0) == 0.0);
    }
  }
  CHECK(ids.size() == 12);

  Dataset d = LoadDataset((root / "a" / "manifest.jsonl").string());
  CHECK(d.train.size() == 8);
  CHECK(d.val.size() == 2);
  CHECK(d.test.size() == 2);
  CHECK(d.clean.size() == 8);
  Dataset direct = GenerateDataset(spec);
  // WAVs are float32, so compare at that precision.
  for (int64_t n = 0; n < direct.train[3].mixture.Length(); n += 97)
    CHECK(d.train[3].mixture(2, n) == doctest::Approx(direct.train[3].mixture(2, n)).epsilon(1e-6));

  spec.n_train = 0;
  CHECK_THROWS_AS(GenerateDataset(spec), std::invalid_argument);
  std::filesystem::remove_all(root);
}
