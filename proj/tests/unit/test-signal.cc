// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "remixsep/signal/stft.h"
#include "remixsep/signal/wav-io.h"
#include "remixsep/util/rng.h"

using namespace remixsep;

namespace {

Waveform RandomWave(Rng& rng, int channels, int64_t length, double rate = 16000) {
  Waveform w(channels, length, rate);
  for (double& v : w.Data()) v = rng.Normal();
  return w;
}

// Direct DFT of frame t of channel c, with the same reflect padding.
std::vector<cplx> NaiveFrame(const Waveform& w, int c, int t, int n_fft, int hop) {
  const auto win = MakeWindow(WindowType::kHannPeriodic, n_fft);
  const int64_t L = w.Length();
  std::vector<cplx> out(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k) {
    cplx acc = 0.0;
    for (int n = 0; n < n_fft; ++n) {
      int64_t j = static_cast<int64_t>(t) * hop + n - n_fft / 2;
      if (j < 0) j = -j;
      if (j >= L) j = 2 * (L - 1) - j;
      acc += w(c, j) * win[n] *
             std::polar(1.0, -2.0 * std::numbers::pi * k * n / n_fft);
    }
    out[k] = acc;
  }
  return out;
}

double RelError(std::span<const double> a, std::span<const double> b,
                int64_t skip = 0) {
  double num = 0.0, den = 0.0;
  for (int64_t i = skip; i + skip < static_cast<int64_t>(a.size()); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("stft shape follows n_fft and hop") {
  Rng rng(1);
  Waveform w = RandomWave(rng, 2, 16000);
  Spectrogram s = Stft(w, 512, 128);
  CHECK(s.NumBins() == 257);
  CHECK(s.NumChannels() == 2);
  CHECK(s.NumFrames() == 1 + 16000 / 128);
  CHECK(s.Params().signal_length == 16000);
}

TEST_CASE("stft matches a per-frame direct DFT") {
  Rng rng(2);
  Waveform w = RandomWave(rng, 2, 1500);
  Spectrogram s = Stft(w, 64, 16);
  for (int c = 0; c < 2; ++c)
    for (int t : {0, 1, 7, s.NumFrames() - 1}) {
      auto ref = NaiveFrame(w, c, t, 64, 16);
      for (int f = 0; f < 33; ++f)
        CHECK(std::abs(s(c, f, t) - ref[f]) < 1e-10 * (1 + std::abs(ref[f])));
    }
}

TEST_CASE("bin-centred sinusoid concentrates in its bin") {
  const int n_fft = 512, k = 40;
  Waveform w(1, 8192, 16000);
  for (int64_t n = 0; n < w.Length(); ++n)
    w(0, n) = std::cos(2 * std::numbers::pi * k * n / n_fft);
  Spectrogram s = Stft(w, n_fft, 128);
  const int t = s.NumFrames() / 2;
  const double peak = std::abs(s(0, k, t));
  // Periodic Hann: main lobe spans k +- 1, everything else is zero.
  CHECK(peak == doctest::Approx(n_fft / 4.0).epsilon(1e-9));
  CHECK(std::abs(s(0, k - 1, t)) == doctest::Approx(n_fft / 8.0).epsilon(1e-9));
  for (int f = 0; f < s.NumBins(); ++f)
    if (std::abs(f - k) > 1) CHECK(std::abs(s(0, f, t)) < 1e-9 * peak);
  auto ref = NaiveFrame(w, 0, t, n_fft, 128);
  for (int f = 0; f < s.NumBins(); ++f)
    CHECK(std::abs(s(0, f, t) - ref[f]) < 1e-9 * peak);
}

TEST_CASE("stft is linear and maps zero to zero") {
  Rng rng(3);
  Waveform a = RandomWave(rng, 1, 4000), b = RandomWave(rng, 1, 4000);
  const double alpha = 0.7, beta = -1.9;
  Waveform mix(1, 4000, 16000);
  for (int64_t n = 0; n < 4000; ++n) mix(0, n) = alpha * a(0, n) + beta * b(0, n);
  Spectrogram sa = Stft(a, 512, 128), sb = Stft(b, 512, 128), sm = Stft(mix, 512, 128);
  double dev = 0.0, scale = 0.0;
  for (size_t i = 0; i < sm.Size(); ++i) {
    dev = std::max(dev, std::abs(sm.Data()[i] - (alpha * sa.Data()[i] + beta * sb.Data()[i])));
    scale = std::max(scale, std::abs(sm.Data()[i]));
  }
  CHECK(dev < 1e-9 * scale);
  Spectrogram z = Stft(Waveform(1, 4000, 16000), 512, 128);
  for (const cplx& v : z.Data()) CHECK(v == cplx(0.0, 0.0));
  Waveform back = Istft(z);
  for (double v : back.Data()) CHECK(v == 0.0);
}

TEST_CASE("istft inverts stft on multichannel noise") {
  Rng rng(4);
  for (int64_t len : {16000, 16001, 3 * 16000 + 77}) {
    Waveform w = RandomWave(rng, 4, len);
    Waveform y = Istft(Stft(w, 512, 128));
    REQUIRE(y.Length() == len);
    for (int c = 0; c < 4; ++c) CHECK(RelError(y.Channel(c), w.Channel(c)) < 1e-10);
  }
}

TEST_CASE("frame energy obeys Parseval") {
  Rng rng(5);
  Waveform w = RandomWave(rng, 1, 4096);
  const int n_fft = 256;
  Spectrogram s = Stft(w, n_fft, 64);
  const auto win = MakeWindow(WindowType::kHannPeriodic, n_fft);
  const int t = 10;
  double time_energy = 0.0;
  for (int n = 0; n < n_fft; ++n) {
    double v = w(0, t * 64 + n - n_fft / 2) * win[n];
    time_energy += v * v;
  }
  double freq_energy = 0.0;
  for (int f = 0; f < s.NumBins(); ++f) {
    double e = std::norm(s(0, f, t));
    freq_energy += (f == 0 || f == n_fft / 2) ? e : 2 * e;
  }
  CHECK(std::abs(freq_energy / n_fft - time_energy) < 1e-10 * time_energy);
}

TEST_CASE("overlap-add condition") {
  CHECK(SatisfiesOverlapAdd(WindowType::kHannPeriodic, 512, 128));
  CHECK(SatisfiesOverlapAdd(WindowType::kHannPeriodic, 512, 64));
  // Synthesis divides by the squared-window sum, which ripples at 50 %.
  CHECK_FALSE(SatisfiesOverlapAdd(WindowType::kHannPeriodic, 512, 256));
  CHECK_FALSE(SatisfiesOverlapAdd(WindowType::kHannPeriodic, 512, 300));
  Rng rng(6);
  Spectrogram s = Stft(RandomWave(rng, 1, 2000), 512, 300);
  CHECK_THROWS_AS(Istft(s), std::invalid_argument);
}

TEST_CASE("stft rejects bad arguments") {
  Rng rng(7);
  Waveform w = RandomWave(rng, 1, 1000);
  CHECK_THROWS_AS(Stft(Waveform(), 512, 128), std::invalid_argument);
  CHECK_THROWS_AS(Stft(w, 500, 128), std::invalid_argument);
  CHECK_THROWS_AS(Stft(w, 512, 0), std::invalid_argument);
  CHECK_THROWS_AS(Stft(w, 512, 513), std::invalid_argument);
  CHECK_THROWS_AS(Stft(RandomWave(rng, 1, 100), 512, 128), std::invalid_argument);
}

TEST_CASE("spectrogram arithmetic checks metadata") {
  Rng rng(8);
  Waveform w = RandomWave(rng, 2, 4000);
  Spectrogram a = Stft(w, 512, 128), b = Stft(w, 512, 256);
  CHECK_THROWS_AS(a += b, std::invalid_argument);
  Spectrogram d = a - a;
  CHECK(d.SquaredNorm() == 0.0);
  Spectrogram twice = a + a;
  CHECK(twice.SquaredNorm() == doctest::Approx(4 * a.SquaredNorm()));
  Spectrogram crop = a.Frames(3, 5);
  CHECK(crop.NumFrames() == 5);
  CHECK(crop(1, 17, 0) == a(1, 17, 3));
  CHECK_THROWS(a.Frames(30, 10));
}

TEST_CASE("wav round trip") {
  Rng rng(9);
  const auto dir = std::filesystem::temp_directory_path() / "remixsep_wav_test";
  std::filesystem::create_directories(dir);
  Waveform w(3, 1234, 16000);
  for (double& v : w.Data()) v = rng.Uniform(-0.9, 0.9);
  // float32 is exact after rounding the source to float.
  for (double& v : w.Data()) v = static_cast<float>(v);
  WriteWav((dir / "f.wav").string(), w);
  Waveform r = ReadWav((dir / "f.wav").string());
  REQUIRE(r.NumChannels() == 3);
  REQUIRE(r.Length() == 1234);
  CHECK(r.SampleRate() == 16000);
  for (size_t i = 0; i < r.Data().size(); ++i) CHECK(r.Data()[i] == w.Data()[i]);

  WriteWav((dir / "p.wav").string(), w, WavFormat::kPcm16);
  Waveform p = ReadWav((dir / "p.wav").string());
  double err = 0.0;
  for (size_t i = 0; i < p.Data().size(); ++i)
    err = std::max(err, std::abs(p.Data()[i] - w.Data()[i]));
  CHECK(err <= 1.0 / 32767);
  CHECK_THROWS(ReadWav((dir / "missing.wav").string()));
  std::filesystem::remove_all(dir);
}
