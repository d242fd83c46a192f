// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "remixsep/sim/dataset.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "remixsep/signal/wav-io.h"
#include "remixsep/util/rng.h"

namespace remixsep {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetSpec::Validate() const {
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw std::invalid_argument("DatasetSpec: counts must be >= 1");
  if (n_clean < 0) throw std::invalid_argument("DatasetSpec: n_clean < 0");
  if (!(duration_s > 0.0) || !(sample_rate > 0.0))
    throw std::invalid_argument("DatasetSpec: invalid duration/sample rate");
  if (num_sources < 1 || num_sources > static_cast<int>(DirectionGrid().size()))
    throw std::invalid_argument("DatasetSpec: invalid source count");
}

namespace {

std::string MakeId(const std::string& split, int index) {
  std::ostringstream os;
  os << split << '_' << std::setw(5) << std::setfill('0') << index;
  return os.str();
}

MixtureRecord MakeRecord(const DatasetSpec& spec, const ArrayGeometry& g,
                         const Rng& split_rng, const std::string& split,
                         int index) {
  Rng rng = split_rng.Split(static_cast<uint64_t>(index));
  std::vector<double> grid = DirectionGrid();
  rng.Shuffle(grid);
  SceneSpec scene;
  scene.source_distance = spec.source_distance;
  scene.seed = rng.NextU64();
  scene.source_directions.assign(grid.begin(), grid.begin() + spec.num_sources);
  std::vector<Waveform> sources;
  for (int i = 0; i < spec.num_sources; ++i)
    sources.push_back(
        SynthSource(rng.NextU64(), spec.duration_s, spec.sample_rate));
  MixtureRecord rec = RenderScene(scene, sources, g);
  rec.id = MakeId(split, index);
  return rec;
}

std::vector<MixtureRecord> MakeSplit(const DatasetSpec& spec,
                                     const ArrayGeometry& g, uint64_t stream,
                                     const std::string& split, int count) {
  Rng split_rng = Rng(spec.seed).Split(stream);
  std::vector<MixtureRecord> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(MakeRecord(spec, g, split_rng, split, i));
  return out;
}

void EnsureDir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw std::runtime_error("cannot create directory " + p.string());
}

json EntryToJson(const ManifestEntry& e) {
  return json{{"id", e.id},
              {"split", e.split},
              {"mixture_path", e.mixture_path},
              {"source_paths", e.source_paths},
              {"directions", e.directions},
              {"distance", e.distance},
              {"seed", e.seed}};
}

}  // namespace

Dataset GenerateDataset(const DatasetSpec& spec, const ArrayGeometry& g) {
  spec.Validate();
  g.Validate();
  Dataset data;
  data.geometry = g;
  data.train = MakeSplit(spec, g, stream::kDatasetTrain, "train", spec.n_train);
  data.val = MakeSplit(spec, g, stream::kDatasetVal, "val", spec.n_val);
  data.test = MakeSplit(spec, g, stream::kDatasetTest, "test", spec.n_test);
  const int n_clean = spec.n_clean > 0 ? spec.n_clean : spec.n_train;
  Rng clean_rng = Rng(spec.seed).Split(stream::kDatasetClean);
  for (int i = 0; i < n_clean; ++i) {
    CleanUtterance u;
    u.id = MakeId("clean", i);
    u.seed = clean_rng.Split(static_cast<uint64_t>(i)).NextU64();
    u.audio = SynthSource(u.seed, spec.duration_s, spec.sample_rate);
    data.clean.push_back(std::move(u));
  }
  return data;
}

std::vector<ManifestEntry> WriteDataset(const Dataset& data,
                                        const std::string& out_dir) {
  const fs::path root(out_dir);
  EnsureDir(root / "mixtures");
  EnsureDir(root / "sources");
  EnsureDir(root / "clean");

  std::vector<ManifestEntry> entries;
  auto write_split = [&](const std::vector<MixtureRecord>& recs,
                         const std::string& split) {
    for (const auto& rec : recs) {
      ManifestEntry e;
      e.id = rec.id;
      e.split = split;
      e.mixture_path = "mixtures/" + rec.id + ".wav";
      e.directions = rec.scene.source_directions;
      e.seed = rec.scene.seed;
      e.distance = rec.scene.source_distance;
      WriteWav((root / e.mixture_path).string(), rec.mixture);
      for (size_t i = 0; i < rec.images.size(); ++i) {
        std::string p = "sources/" + rec.id + "_s" + std::to_string(i) + ".wav";
        WriteWav((root / p).string(), rec.images[i]);
        e.source_paths.push_back(p);
      }
      entries.push_back(std::move(e));
    }
  };
  write_split(data.train, "train");
  write_split(data.val, "val");
  write_split(data.test, "test");

  std::ofstream manifest(root / "manifest.jsonl");
  if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir);
  for (const auto& e : entries) manifest << EntryToJson(e).dump() << '\n';

  std::ofstream clean(root / "clean_pool.jsonl");
  if (!clean) throw std::runtime_error("cannot write clean pool in " + out_dir);
  for (const auto& u : data.clean) {
    std::string p = "clean/" + u.id + ".wav";
    WriteWav((root / p).string(), u.audio);
    clean << json{{"id", u.id}, {"path", p}, {"seed", u.seed}}.dump() << '\n';
  }
  if (!manifest || !clean)
    throw std::runtime_error("write failed in " + out_dir);
  return entries;
}

std::vector<ManifestEntry> GenerateDatasetToDisk(const DatasetSpec& spec,
                                                 const std::string& out_dir) {
  return WriteDataset(GenerateDataset(spec), out_dir);
}

std::vector<ManifestEntry> ReadManifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest_path);
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.split = j.value("split", std::string("test"));
    e.mixture_path = j.at("mixture_path").get<std::string>();
    e.source_paths = j.at("source_paths").get<std::vector<std::string>>();
    e.directions = j.at("directions").get<std::vector<double>>();
    e.seed = j.at("seed").get<uint64_t>();
    e.distance = j.value("distance", 1.0);
    out.push_back(std::move(e));
  }
  return out;
}

Dataset LoadDataset(const std::string& manifest_path, const ArrayGeometry& g) {
  const fs::path root = fs::path(manifest_path).parent_path();
  Dataset data;
  data.geometry = g;
  for (const auto& e : ReadManifest(manifest_path)) {
    MixtureRecord rec;
    rec.id = e.id;
    rec.scene.source_directions = e.directions;
    rec.scene.source_distance = e.distance;
    rec.scene.seed = e.seed;
    rec.mixture = ReadWav((root / e.mixture_path).string());
    for (const auto& p : e.source_paths)
      rec.images.push_back(ReadWav((root / p).string()));
    if (rec.mixture.NumChannels() != g.NumMics())
      throw std::runtime_error("LoadDataset: channel count does not match array");
    if (e.split == "train")
      data.train.push_back(std::move(rec));
    else if (e.split == "val")
      data.val.push_back(std::move(rec));
    else
      data.test.push_back(std::move(rec));
  }
  const fs::path clean_path = root / "clean_pool.jsonl";
  if (fs::exists(clean_path)) {
    std::ifstream in(clean_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      CleanUtterance u;
      u.id = j.at("id").get<std::string>();
      u.seed = j.at("seed").get<uint64_t>();
      u.audio = ReadWav((root / j.at("path").get<std::string>()).string());
      data.clean.push_back(std::move(u));
    }
  }
  return data;
}

}  // namespace remixsep
