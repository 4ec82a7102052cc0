#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "synthdet/randomizer.hpp"

namespace synthdet {

struct ManifestRecord {
  std::string image;       // path to the image file
  std::string annotation;  // path/ref of the matching annotation document
  DatasetVariant variant = DatasetVariant::kFix;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
  std::uint64_t seed = 0;
};

// JSONL, one {"image","annotation","variant"} object per line.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

struct MixComponent {
  DatasetManifest source;
  double fraction = 0.0;
  std::string name;  // for error messages
};

struct MixSpec {
  std::vector<MixComponent> components;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;
};

// floor(fraction*total) plus largest-remainder correction; the counts sum
// to total exactly.
std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& fractions,
                                                  std::size_t total);

// Draws each component's share without replacement and returns the
// combined records in a seeded permutation. Fractions must sum to 1.
DatasetManifest compose(const MixSpec& spec);

// Pairs image files with same-stem annotation files (refined images keep
// their source annotations).
DatasetManifest ingest_external(const std::filesystem::path& dir, DatasetVariant variant);

struct CropConfig {
  int size = 256;
  int per_image = 4;
  std::uint64_t seed = 0;
};

// Extracts per_image random crops from every manifest image into out_dir,
// named <stem>_<ox>_<oy>.png. Offsets are uniform over the valid range;
// crop pixels are byte-equal to the source window.
std::vector<std::filesystem::path> extract_crops(const DatasetManifest& manifest,
                                                 const CropConfig& config,
                                                 const std::filesystem::path& out_dir);

// Disjoint, exhaustive, seed-deterministic partition.
std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double train_fraction, double val_fraction,
                                                  std::uint64_t seed);

}  // namespace synthdet
