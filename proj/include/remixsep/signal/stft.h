// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_SIGNAL_STFT_H_
#define REMIXSEP_SIGNAL_STFT_H_

#include <vector>

#include "remixsep/signal/spectrogram.h"
#include "remixsep/signal/waveform.h"

namespace remixsep {

std::vector<double> MakeWindow(WindowType type, int n_fft);

// Analysis with a periodic Hann window. The signal is reflect-padded by
// n_fft/2 on both sides, so frame t is centred on sample t * hop and there
// are 1 + length / hop frames.
//
// Requires n_fft to be a power of two, 0 < hop <= n_fft and
// length >= n_fft; throws std::invalid_argument otherwise.
Spectrogram Stft(const Waveform& w, int n_fft, int hop);

// Weighted overlap-add synthesis (analysis window reused for synthesis,
// normalized by the summed squared window). Throws std::invalid_argument
// when the squared window does not overlap-add to a constant at the given
// hop, since the interior would then not reconstruct exactly.
Waveform Istft(const Spectrogram& s);

// True when sum_k w^2(n - k * hop) is constant in n.
bool SatisfiesOverlapAdd(WindowType type, int n_fft, int hop);

}  // namespace remixsep

#endif  // REMIXSEP_SIGNAL_STFT_H_
