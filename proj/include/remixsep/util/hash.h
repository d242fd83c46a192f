// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_UTIL_HASH_H_
#define REMIXSEP_UTIL_HASH_H_

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace remixsep {

// 64-bit FNV-1a. Stable across platforms; used for config and parameter
// fingerprints, not for anything security related.
class Fnv1a {
 public:
  void Update(const void* data, size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ull;
    }
  }
  void Update(std::string_view s) { Update(s.data(), s.size()); }
  void Update(std::span<const double> v) {
    Update(v.data(), v.size() * sizeof(double));
  }
  uint64_t Digest() const { return state_; }
  std::string HexDigest() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ull;
};

inline std::string Fnv1a::HexDigest() const {
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  uint64_t v = state_;
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace remixsep

#endif  // REMIXSEP_UTIL_HASH_H_
