// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIM_ARRAY_SIM_H_
#define REMIXSEP_SIM_ARRAY_SIM_H_

#include <array>
#include <cstdint>
#include <vector>

#include "remixsep/signal/spectrogram.h"
#include "remixsep/signal/waveform.h"

namespace remixsep {

struct ArrayGeometry {
  // Microphone coordinates in metres. The array centre (mean position) is
  // the phase origin; direction 0 deg points along +y (broadside for an
  // array laid out on the x axis), +90 deg along +x.
  std::vector<std::array<double, 2>> mic_positions;
  double speed_of_sound = 343.0;

  int NumMics() const { return static_cast<int>(mic_positions.size()); }
  std::array<double, 2> Center() const;
  // Throws std::invalid_argument unless M >= 2, positions are distinct and
  // the speed of sound is positive.
  void Validate() const;

  // num_mics microphones on the x axis, `spacing` metres apart, centred on
  // the origin.
  static ArrayGeometry Linear(int num_mics, double spacing,
                              double speed_of_sound = 343.0);
};

// Four microphones at 3 cm spacing.
ArrayGeometry DefaultGeometry();

// Far-field propagation delay, in seconds, of mic m relative to the array
// centre for a plane wave arriving from direction_deg.
double PropagationDelay(const ArrayGeometry& g, int mic, double direction_deg);

struct SteeringVector {
  double direction_deg = 0.0;
  int num_mics = 0;
  int num_bins = 0;
  // Indexed [mic][bin].
  std::vector<cplx> values;

  cplx operator()(int m, int f) const { return values[m * num_bins + f]; }
};

// Entry (m, f) = exp(-j 2 pi f_hz tau_m). Throws std::invalid_argument for
// |direction_deg| > 90.
SteeringVector ComputeSteeringVector(const ArrayGeometry& g,
                                     double direction_deg, int n_fft,
                                     double sample_rate);

// Speech-like test source: a harmonic stack on a drifting fundamental
// (80-300 Hz), shaped by three slowly moving formant resonances and a
// syllabic (2-8 Hz) amplitude envelope with near-silent gaps. Deterministic
// in `seed`; normalized to unit RMS. Throws std::invalid_argument for a
// non-positive duration.
Waveform SynthSource(uint64_t seed, double duration_s, double sample_rate);

struct SceneSpec {
  std::vector<double> source_directions;  // degrees, multiples of 15
  double source_distance = 1.0;           // metres; metadata only
  uint64_t seed = 0;

  void Validate() const;
};

struct MixtureRecord {
  std::string id;
  Waveform mixture;                       // M channels
  std::vector<Waveform> images;           // per source, M channels
  SceneSpec scene;
};

// Delays a single-channel signal to each microphone by a frequency-domain
// phase ramp (one zero-padded block) and returns the M-channel image.
Waveform RenderImage(const Waveform& source, const ArrayGeometry& g,
                     double direction_deg);

// Renders each source to its image and sums them. Throws
// std::invalid_argument on count or length mismatch.
MixtureRecord RenderScene(const SceneSpec& spec,
                          const std::vector<Waveform>& sources,
                          const ArrayGeometry& g);

// The 13 admissible directions -90, -75, ..., 90.
std::vector<double> DirectionGrid();

}  // namespace remixsep

#endif  // REMIXSEP_SIM_ARRAY_SIM_H_
