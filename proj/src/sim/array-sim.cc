// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/sim/array-sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "remixsep/signal/fft.h"
#include "remixsep/util/rng.h"

namespace remixsep {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

std::array<double, 2> ArrayGeometry::Center() const {
  std::array<double, 2> c{0.0, 0.0};
  for (const auto& p : mic_positions) {
    c[0] += p[0];
    c[1] += p[1];
  }
  if (!mic_positions.empty()) {
    c[0] /= mic_positions.size();
    c[1] /= mic_positions.size();
  }
  return c;
}

void ArrayGeometry::Validate() const {
  if (NumMics() < 2)
    throw std::invalid_argument("ArrayGeometry: need at least two mics");
  if (!(speed_of_sound > 0.0))
    throw std::invalid_argument("ArrayGeometry: speed of sound must be > 0");
  for (int a = 0; a < NumMics(); ++a)
    for (int b = a + 1; b < NumMics(); ++b)
      if (mic_positions[a] == mic_positions[b])
        throw std::invalid_argument("ArrayGeometry: duplicate mic position");
}

ArrayGeometry ArrayGeometry::Linear(int num_mics, double spacing,
                                    double speed_of_sound) {
  ArrayGeometry g;
  g.speed_of_sound = speed_of_sound;
  for (int m = 0; m < num_mics; ++m)
    g.mic_positions.push_back({(m - 0.5 * (num_mics - 1)) * spacing, 0.0});
  return g;
}

ArrayGeometry DefaultGeometry() { return ArrayGeometry::Linear(4, 0.03); }

double PropagationDelay(const ArrayGeometry& g, int mic,
                        double direction_deg) {
  const auto c = g.Center();
  const double theta = direction_deg * kDegToRad;
  const double ux = std::sin(theta), uy = std::cos(theta);
  const double px = g.mic_positions[mic][0] - c[0];
  const double py = g.mic_positions[mic][1] - c[1];
  // A mic displaced towards the source hears the wavefront early.
  return -(px * ux + py * uy) / g.speed_of_sound;
}

SteeringVector ComputeSteeringVector(const ArrayGeometry& g,
                                     double direction_deg, int n_fft,
                                     double sample_rate) {
  if (std::abs(direction_deg) > 90.0)
    throw std::invalid_argument("ComputeSteeringVector: |direction| > 90");
  SteeringVector sv;
  sv.direction_deg = direction_deg;
  sv.num_mics = g.NumMics();
  sv.num_bins = n_fft / 2 + 1;
  sv.values.resize(static_cast<size_t>(sv.num_mics) * sv.num_bins);
  for (int m = 0; m < sv.num_mics; ++m) {
    const double tau = PropagationDelay(g, m, direction_deg);
    for (int f = 0; f < sv.num_bins; ++f) {
      const double hz = f * sample_rate / n_fft;
      sv.values[m * sv.num_bins + f] = std::polar(1.0, -2.0 * kPi * hz * tau);
    }
  }
  return sv;
}

Waveform SynthSource(uint64_t seed, double duration_s, double sample_rate) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("SynthSource: duration must be positive");
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("SynthSource: sample rate must be positive");
  Rng rng(seed, {0x5eed});
  const int64_t n = static_cast<int64_t>(std::llround(duration_s * sample_rate));
  const double nyquist = 0.5 * sample_rate;

  // Fundamental: base pitch with a slow random drift and light vibrato.
  const double f0_base = rng.Uniform(95.0, 240.0);
  const double drift_rate = rng.Uniform(0.15, 0.6);
  const double drift_phase = rng.Uniform(0.0, 2.0 * kPi);
  const double drift_depth = rng.Uniform(0.08, 0.25);
  const double vib_rate = rng.Uniform(4.0, 6.5);
  const double vib_depth = rng.Uniform(0.005, 0.02);

  // Formants: centre frequencies wander slowly around a per-source vowel.
  struct Formant {
    double centre, bandwidth, swing, rate, phase, gain;
  };
  const Formant formants[3] = {
      {rng.Uniform(350.0, 850.0), rng.Uniform(80.0, 140.0),
       rng.Uniform(50.0, 200.0), rng.Uniform(0.5, 3.0),
       rng.Uniform(0.0, 2 * kPi), 1.0},
      {rng.Uniform(1000.0, 2300.0), rng.Uniform(100.0, 180.0),
       rng.Uniform(100.0, 400.0), rng.Uniform(0.5, 3.0),
       rng.Uniform(0.0, 2 * kPi), rng.Uniform(0.4, 0.8)},
      {rng.Uniform(2400.0, 3400.0), rng.Uniform(150.0, 250.0),
       rng.Uniform(50.0, 250.0), rng.Uniform(0.5, 3.0),
       rng.Uniform(0.0, 2 * kPi), rng.Uniform(0.2, 0.5)},
  };

  // Syllabic envelope: raised-cosine bumps with per-syllable gains.
  const double syl_rate = rng.Uniform(2.0, 8.0);
  const double syl_phase = rng.Uniform(0.0, 2.0 * kPi);
  const int num_syllables =
      static_cast<int>(std::ceil(duration_s * syl_rate)) + 2;
  std::vector<double> syl_gain(num_syllables);
  for (double& gsyl : syl_gain) gsyl = rng.Uniform(0.4, 1.0);

  const int max_harmonics = static_cast<int>(nyquist / 80.0);
  std::vector<double> phase(max_harmonics, 0.0);
  for (double& p : phase) p = rng.Uniform(0.0, 2.0 * kPi);

  Waveform w(1, n, sample_rate);
  auto y = w.Channel(0);
  for (int64_t i = 0; i < n; ++i) {
    const double t = i / sample_rate;
    double f0 = f0_base *
                (1.0 + drift_depth * std::sin(2 * kPi * drift_rate * t + drift_phase) +
                 vib_depth * std::sin(2 * kPi * vib_rate * t));
    f0 = std::clamp(f0, 80.0, 300.0);

    double fc[3];
    for (int k = 0; k < 3; ++k)
      fc[k] = formants[k].centre +
              formants[k].swing *
                  std::sin(2 * kPi * formants[k].rate * t + formants[k].phase);

    double sample = 0.0;
    for (int h = 0; h < max_harmonics; ++h) {
      const double hz = (h + 1) * f0;
      phase[h] += 2.0 * kPi * hz / sample_rate;
      if (phase[h] > 2.0 * kPi) phase[h] -= 2.0 * kPi;
      if (hz >= nyquist * 0.95) continue;
      double env = 0.02;  // spectral floor between formants
      for (int k = 0; k < 3; ++k) {
        const double d = (hz - fc[k]) / formants[k].bandwidth;
        env += formants[k].gain / (1.0 + d * d);
      }
      sample += env / std::sqrt(h + 1.0) * std::sin(phase[h]);
    }

    const double syl_pos = syl_rate * t + syl_phase / (2 * kPi);
    const int syl_index = static_cast<int>(std::floor(syl_pos)) % num_syllables;
    const double bump = 0.5 - 0.5 * std::cos(2 * kPi * syl_pos);
    y[i] = sample * syl_gain[syl_index] * bump * bump;
  }

  const double rms = std::sqrt(w.SquaredNorm() / static_cast<double>(n));
  if (rms > 0.0) w *= 1.0 / rms;
  return w;
}

void SceneSpec::Validate() const {
  if (!(source_distance > 0.0))
    throw std::invalid_argument("SceneSpec: distance must be positive");
  for (size_t a = 0; a < source_directions.size(); ++a) {
    if (std::abs(source_directions[a]) > 90.0)
      throw std::invalid_argument("SceneSpec: direction outside [-90, 90]");
    if (std::fmod(source_directions[a], 15.0) != 0.0)
      throw std::invalid_argument("SceneSpec: direction not on the 15 degree grid");
    for (size_t b = a + 1; b < source_directions.size(); ++b)
      if (source_directions[a] == source_directions[b])
        throw std::invalid_argument("SceneSpec: duplicate source direction");
  }
}

Waveform RenderImage(const Waveform& source, const ArrayGeometry& g,
                     double direction_deg) {
  if (source.NumChannels() != 1)
    throw std::invalid_argument("RenderImage: source must be single-channel");
  const int64_t len = source.Length();
  const double fs = source.SampleRate();
  // Room for the (sub-millisecond) advance/delay and its sinc tails.
  const int pad = 256;
  const int n = NextPowerOfTwo(len + 2 * pad);
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  auto x = source.Channel(0);
  std::copy(x.begin(), x.end(), buf.begin() + pad);
  std::vector<cplx> spec(fft.NumBins());
  fft.Forward(buf, spec);

  Waveform image(g.NumMics(), len, fs);
  std::vector<cplx> shifted(spec.size());
  std::vector<double> out(n);
  for (int m = 0; m < g.NumMics(); ++m) {
    const double tau = PropagationDelay(g, m, direction_deg);
    for (int k = 0; k < fft.NumBins(); ++k) {
      const double hz = k * fs / n;
      shifted[k] = spec[k] * std::polar(1.0, -2.0 * kPi * hz * tau);
    }
    // Keep the Nyquist bin real so the inverse stays a real delay.
    shifted.back() = cplx(shifted.back().real(), 0.0);
    fft.Inverse(shifted, out);
    auto y = image.Channel(m);
    std::copy(out.begin() + pad, out.begin() + pad + len, y.begin());
  }
  return image;
}

MixtureRecord RenderScene(const SceneSpec& spec,
                          const std::vector<Waveform>& sources,
                          const ArrayGeometry& g) {
  spec.Validate();
  g.Validate();
  if (sources.size() != spec.source_directions.size())
    throw std::invalid_argument("RenderScene: source/direction count mismatch");
  if (sources.empty())
    throw std::invalid_argument("RenderScene: no sources");
  for (const auto& s : sources)
    if (s.Length() != sources.front().Length() ||
        s.SampleRate() != sources.front().SampleRate())
      throw std::invalid_argument("RenderScene: source length mismatch");

  MixtureRecord rec;
  rec.scene = spec;
  rec.mixture = Waveform(g.NumMics(), sources.front().Length(),
                         sources.front().SampleRate());
  for (size_t i = 0; i < sources.size(); ++i) {
    rec.images.push_back(
        RenderImage(sources[i], g, spec.source_directions[i]));
    rec.mixture += rec.images.back();
  }
  return rec;
}

std::vector<double> DirectionGrid() {
  std::vector<double> grid;
  for (int d = -90; d <= 90; d += 15) grid.push_back(d);
  return grid;
}

}  // namespace remixsep
