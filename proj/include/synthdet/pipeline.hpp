#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "synthdet/annotate.hpp"
#include "synthdet/catalog.hpp"
#include "synthdet/composer.hpp"
#include "synthdet/renderer.hpp"

namespace synthdet {

struct GenerateOptions {
  DatasetVariant variant = DatasetVariant::kRandTex;
  std::uint64_t count = 0;
  std::uint64_t master_seed = 0;
  RenderConfig render;
  SceneParams scene;
  int workers = 0;          // frame-level pool; 0 = hardware concurrency
  std::size_t min_pixels = 0;  // visibility filter; 0 = default for the resolution
};

struct GenerateResult {
  std::filesystem::path coco_path;
  std::filesystem::path manifest_path;
  std::uint64_t frames = 0;
};

// Runs the full per-frame pipeline (sample scene -> settle -> render ->
// annotate) for options.count frames and writes frame_{i:06}.png,
// frame_{i:06}_ids.png, annotations.json and manifest.jsonl into out_dir.
// Output bytes depend only on (catalog, options); the worker count does
// not change them. On failure a ".failed" marker replaces the COCO
// document instead of leaving a truncated one.
GenerateResult generate_dataset(const PartCatalog& catalog, const GenerateOptions& options,
                                const std::filesystem::path& out_dir,
                                std::ostream* progress = nullptr);

std::string frame_image_name(std::uint64_t index);
std::string frame_ids_name(std::uint64_t index);

}  // namespace synthdet
