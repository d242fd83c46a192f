// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIGNAL_WAV_IO_H_
#define REMIXSEP_SIGNAL_WAV_IO_H_

#include <string>

#include "remixsep/signal/waveform.h"

namespace remixsep {

enum class WavFormat { kPcm16, kFloat32 };

// Little-endian RIFF/WAVE. PCM16 samples map to [-1, 1) by 1/32768; float
// samples are stored as-is. Throws std::runtime_error on I/O or format
// errors.
Waveform ReadWav(const std::string& path);
void WriteWav(const std::string& path, const Waveform& w,
              WavFormat format = WavFormat::kFloat32);

}  // namespace remixsep

#endif  // REMIXSEP_SIGNAL_WAV_IO_H_
