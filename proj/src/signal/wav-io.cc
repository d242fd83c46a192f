// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/signal/wav-io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace remixsep {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

uint16_t U16(const unsigned char* p) { return p[0] | (p[1] << 8); }
uint32_t U32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<unsigned char>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back(v >> 8);
}
void PutU32(std::vector<unsigned char>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
void PutTag(std::vector<unsigned char>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ReadWav: cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("ReadWav: not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  uint32_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* chunk = buf.data() + pos;
    uint32_t size = U32(chunk + 4);
    if (pos + 8 + size > buf.size())
      throw std::runtime_error("ReadWav: truncated chunk in " + path);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw std::runtime_error("ReadWav: short fmt chunk");
      format = U16(chunk + 8);
      channels = U16(chunk + 10);
      rate = U32(chunk + 12);
      bits = U16(chunk + 22);
      if (format == kFormatExtensible && size >= 26) format = U16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (data == nullptr || channels == 0)
    throw std::runtime_error("ReadWav: missing fmt or data chunk in " + path);

  bool pcm16 = format == kFormatPcm && bits == 16;
  bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw std::runtime_error("ReadWav: unsupported sample format in " + path);

  const size_t bytes = bits / 8;
  const int64_t frames = data_size / (bytes * channels);
  Waveform w(channels, frames, rate);
  for (int64_t n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const unsigned char* s = data + (n * channels + c) * bytes;
      if (pcm16) {
        w(c, n) = static_cast<int16_t>(U16(s)) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        w(c, n) = v;
      }
    }
  }
  return w;
}

void WriteWav(const std::string& path, const Waveform& w, WavFormat format) {
  const uint16_t channels = static_cast<uint16_t>(w.NumChannels());
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint32_t rate = static_cast<uint32_t>(std::lround(w.SampleRate()));
  const uint32_t block = channels * bits / 8;
  const uint32_t data_size = static_cast<uint32_t>(w.Length()) * block;

  std::vector<unsigned char> b;
  b.reserve(44 + data_size);
  PutTag(b, "RIFF");
  PutU32(b, 36 + data_size);
  PutTag(b, "WAVE");
  PutTag(b, "fmt ");
  PutU32(b, 16);
  PutU16(b, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(b, channels);
  PutU32(b, rate);
  PutU32(b, rate * block);
  PutU16(b, static_cast<uint16_t>(block));
  PutU16(b, bits);
  PutTag(b, "data");
  PutU32(b, data_size);
  for (int64_t n = 0; n < w.Length(); ++n) {
    for (int c = 0; c < channels; ++c) {
      double v = w(c, n);
      if (format == WavFormat::kPcm16) {
        double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
        int16_t q = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
        PutU16(b, static_cast<uint16_t>(q));
      } else {
        float f = static_cast<float>(v);
        unsigned char raw[4];
        std::memcpy(raw, &f, 4);
        b.insert(b.end(), raw, raw + 4);
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("WriteWav: cannot open " + path);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
  if (!out) throw std::runtime_error("WriteWav: write failed for " + path);
}

}  // namespace remixsep
