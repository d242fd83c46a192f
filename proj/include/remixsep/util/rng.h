// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_UTIL_RNG_H_
#define REMIXSEP_UTIL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace remixsep {

// Splittable, platform-stable random source. A generator is identified by
// its root seed plus a path of stream ids; Split() derives an independent
// child. Distributions are implemented here rather than via <random> so the
// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed, std::initializer_list<uint64_t> path = {});

  Rng Split(uint64_t stream) const;

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  Rng(std::vector<uint64_t> path);
  std::vector<uint64_t> path_;
  std::mt19937_64 engine_;
};

// Stream ids used to split the run seed. Kept in one place so that no two
// consumers accidentally share a stream.
namespace stream {
inline constexpr uint64_t kDatasetTrain = 1;
inline constexpr uint64_t kDatasetVal = 2;
inline constexpr uint64_t kDatasetTest = 3;
inline constexpr uint64_t kDatasetClean = 4;
inline constexpr uint64_t kInitSeparator = 10;
inline constexpr uint64_t kInitDiscriminator = 11;
inline constexpr uint64_t kEpoch = 20;
inline constexpr uint64_t kProbe = 21;
inline constexpr uint64_t kDistill = 22;
}  // namespace stream

}  // namespace remixsep

#endif  // REMIXSEP_UTIL_RNG_H_
