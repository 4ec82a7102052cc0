#include "synthdet/composer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "synthdet/png_io.hpp"
#include "synthdet/rng.hpp"

namespace synthdet {

namespace {

// Deterministic Fisher-Yates.
template <typename T>
void shuffle_seeded(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("manifest: cannot open " + path.string() + " for writing");
  for (const ManifestRecord& r : manifest.records) {
    const nlohmann::json line = {{"image", r.image},
                                 {"annotation", r.annotation},
                                 {"variant", to_string(r.variant)}};
    out << line.dump() << "\n";
  }
  if (!out) throw std::runtime_error("manifest: write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      manifest.records.push_back({doc.at("image").get<std::string>(),
                                  doc.at("annotation").get<std::string>(),
                                  variant_from_string(doc.at("variant").get<std::string>())});
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest: " + path.string() + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return manifest;
}

std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& fractions,
                                                  std::size_t total) {
  std::vector<std::size_t> counts(fractions.size());
  std::vector<std::pair<double, std::size_t>> remainders;  // (-remainder, index) for stable sort
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    ++counts[remainders[k].second];
  }
  if (assigned != total) {
    throw std::invalid_argument("compose: fractions do not distribute over the total");
  }
  return counts;
}

DatasetManifest compose(const MixSpec& spec) {
  if (spec.total < 1) throw std::invalid_argument("compose: total must be >= 1");
  if (spec.components.empty()) throw std::invalid_argument("compose: no components");
  double fraction_sum = 0.0;
  std::vector<double> fractions;
  for (const MixComponent& c : spec.components) {
    if (c.fraction < 0.0 || c.fraction > 1.0) {
      throw std::invalid_argument("compose: fraction out of [0,1] for component '" + c.name + "'");
    }
    fraction_sum += c.fraction;
    fractions.push_back(c.fraction);
  }
  if (std::abs(fraction_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("compose: fractions sum to " + std::to_string(fraction_sum) +
                                ", expected 1");
  }

  const auto counts = largest_remainder_counts(fractions, spec.total);
  Rng rng(spec.seed);
  DatasetManifest out;
  out.seed = spec.seed;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const MixComponent& c = spec.components[i];
    if (counts[i] > c.source.records.size()) {
      throw std::runtime_error("compose: component '" + c.name + "' holds " +
                               std::to_string(c.source.records.size()) + " records, needs " +
                               std::to_string(counts[i]));
    }
    // Sample without replacement: shuffle indices, take the prefix.
    std::vector<std::size_t> order(c.source.records.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_seeded(order, rng);
    for (std::size_t k = 0; k < counts[i]; ++k) {
      out.records.push_back(c.source.records[order[k]]);
    }
  }
  shuffle_seeded(out.records, rng);
  return out;
}

DatasetManifest ingest_external(const std::filesystem::path& dir, DatasetVariant variant) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("ingest: not a directory: " + dir.string());
  }
  std::map<std::string, std::filesystem::path> images;
  std::map<std::string, std::filesystem::path> annotations;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    const auto stem = entry.path().stem().string();
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") {
      images[stem] = entry.path();
    } else if (ext == ".json") {
      annotations[stem] = entry.path();
    }
  }
  DatasetManifest manifest;
  for (const auto& [stem, image_path] : images) {  // std::map gives stem order
    const auto ann = annotations.find(stem);
    if (ann == annotations.end()) {
      throw std::runtime_error("ingest: image '" + stem + "' has no matching annotation file");
    }
    manifest.records.push_back({image_path.string(), ann->second.string(), variant});
  }
  return manifest;
}

std::vector<std::filesystem::path> extract_crops(const DatasetManifest& manifest,
                                                 const CropConfig& config,
                                                 const std::filesystem::path& out_dir) {
  if (config.size < 1 || config.per_image < 1) {
    throw std::invalid_argument("crops: size and per_image must be >= 1");
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t rec = 0; rec < manifest.records.size(); ++rec) {
    const auto src_path = std::filesystem::path(manifest.records[rec].image);
    const ImageRgb8 src = read_png_rgb8(src_path);
    if (src.width < config.size || src.height < config.size) {
      throw std::runtime_error("crops: image " + src_path.string() + " (" +
                               std::to_string(src.width) + "x" + std::to_string(src.height) +
                               ") is smaller than the crop size " + std::to_string(config.size));
    }
    Rng rng(derive_frame_seed(config.seed, rec));
    for (int k = 0; k < config.per_image; ++k) {
      const int ox = static_cast<int>(rng.uniform_int(0, src.width - config.size));
      const int oy = static_cast<int>(rng.uniform_int(0, src.height - config.size));
      ImageRgb8 crop(config.size, config.size);
      for (int y = 0; y < config.size; ++y) {
        std::copy_n(src.at(ox, oy + y), static_cast<std::size_t>(config.size) * 3,
                    crop.at(0, y));
      }
      const auto name = src_path.stem().string() + "_" + std::to_string(ox) + "_" +
                        std::to_string(oy) + ".png";
      const auto dst = out_dir / name;
      write_png(dst, crop);
      written.push_back(dst);
    }
  }
  return written;
}

std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& manifest,
                                                  double train_fraction, double val_fraction,
                                                  std::uint64_t seed) {
  if (train_fraction < 0.0 || val_fraction < 0.0 ||
      std::abs(train_fraction + val_fraction - 1.0) > 1e-9) {
    throw std::invalid_argument("split: fractions must be nonnegative and sum to 1");
  }
  std::vector<std::size_t> order(manifest.records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle_seeded(order, rng);

  const auto counts = largest_remainder_counts({train_fraction, val_fraction}, order.size());
  DatasetManifest train, val;
  train.seed = val.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < counts[0] ? train : val).records.push_back(manifest.records[order[i]]);
  }
  return {train, val};
}

}  // namespace synthdet
