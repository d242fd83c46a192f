// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/util/rng.h"

#include <cmath>
#include <numbers>

namespace remixsep {

namespace {

std::mt19937_64 SeedEngine(const std::vector<uint64_t>& path) {
  std::vector<uint32_t> words;
  words.reserve(path.size() * 2 + 1);
  words.push_back(0x72656d78u);  // "remx"
  for (uint64_t p : path) {
    words.push_back(static_cast<uint32_t>(p & 0xffffffffu));
    words.push_back(static_cast<uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(uint64_t seed, std::initializer_list<uint64_t> path) {
  path_.push_back(seed);
  path_.insert(path_.end(), path.begin(), path.end());
  engine_ = SeedEngine(path_);
}

Rng::Rng(std::vector<uint64_t> path)
    : path_(std::move(path)), engine_(SeedEngine(path_)) {}

Rng Rng::Split(uint64_t stream) const {
  std::vector<uint64_t> child = path_;
  child.push_back(stream);
  return Rng(std::move(child));
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  // Box-Muller; the second deviate is discarded to keep the stream simple.
  double u1 = Uniform();
  double u2 = Uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) return 0;
  unsigned __int128 prod =
      static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
  return static_cast<uint64_t>(prod >> 64);
}

}  // namespace remixsep
