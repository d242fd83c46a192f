// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace remixsep {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

const char kMagic[8] = {'R', 'M', 'X', 'S', 'C', 'K', 'P', 'T'};

template <typename T>
void WritePod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void WriteString(std::ostream& os, const std::string& s) {
  WritePod<uint32_t>(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T ReadPod(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw std::runtime_error("checkpoint: truncated file");
  return v;
}

std::string ReadString(std::istream& is) {
  uint32_t n = ReadPod<uint32_t>(is);
  if (n > (1u << 24)) throw std::runtime_error("checkpoint: corrupt string");
  std::string s(n, '\0');
  if (n && !is.read(s.data(), n))
    throw std::runtime_error("checkpoint: truncated file");
  return s;
}

}  // namespace

void Checkpoint::Put(const std::string& prefix, const ParameterSet& params) {
  for (const auto& name : params.Names()) {
    const Tensor& t = params.Get(name);
    tensors.Add(prefix + "/" + name, t.shape, t.values);
  }
}

ParameterSet Checkpoint::Extract(const std::string& prefix) const {
  ParameterSet out;
  const std::string p = prefix + "/";
  for (const auto& name : tensors.Names()) {
    if (name.compare(0, p.size(), p) != 0) continue;
    const Tensor& t = tensors.Get(name);
    out.Add(name.substr(p.size()), t.shape, t.values);
  }
  return out;
}

bool Checkpoint::HasGroup(const std::string& prefix) const {
  const std::string p = prefix + "/";
  for (const auto& name : tensors.Names())
    if (name.compare(0, p.size(), p) == 0) return true;
  return false;
}

const std::string& Checkpoint::Meta(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end())
    throw std::runtime_error("checkpoint: missing metadata '" + key + "'");
  return it->second;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  // Write to a sibling temp file and rename so a crash never leaves a
  // half-written checkpoint behind.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + tmp);
    os.write(kMagic, sizeof(kMagic));
    WritePod<uint32_t>(os, kCheckpointVersion);
    WritePod<uint32_t>(os, static_cast<uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
      WriteString(os, k);
      WriteString(os, v);
    }
    WritePod<uint32_t>(os, static_cast<uint32_t>(ckpt.tensors.NumTensors()));
    for (const auto& name : ckpt.tensors.Names()) {
      const Tensor& t = ckpt.tensors.Get(name);
      WriteString(os, name);
      WritePod<uint32_t>(os, static_cast<uint32_t>(t.shape.size()));
      for (int64_t d : t.shape) WritePod<int64_t>(os, d);
      os.write(reinterpret_cast<const char*>(t.values.data()),
               static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    }
    if (!os) throw std::runtime_error("write failed for checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  uint32_t version = ReadPod<uint32_t>(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version));
  Checkpoint ckpt;
  uint32_t n_meta = ReadPod<uint32_t>(is);
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = ReadString(is);
    ckpt.meta[k] = ReadString(is);
  }
  uint32_t n_tensors = ReadPod<uint32_t>(is);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = ReadString(is);
    uint32_t ndim = ReadPod<uint32_t>(is);
    if (ndim > 8) throw std::runtime_error("checkpoint: corrupt shape");
    ad::Shape shape(ndim);
    for (auto& d : shape) {
      d = ReadPod<int64_t>(is);
      if (d < 0 || d > (int64_t{1} << 32))
        throw std::runtime_error("checkpoint: corrupt shape");
    }
    std::vector<double> values(ad::NumElements(shape));
    if (!values.empty() &&
        !is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double))))
      throw std::runtime_error("checkpoint: truncated file");
    ckpt.tensors.Add(name, std::move(shape), std::move(values));
  }
  return ckpt;
}

}  // namespace remixsep
