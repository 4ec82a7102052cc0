#include "synthdet/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "synthdet/png_io.hpp"
#include "synthdet/rng.hpp"

namespace synthdet {

std::string frame_image_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06llu.png", static_cast<unsigned long long>(index));
  return buf;
}

std::string frame_ids_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06llu_ids.png", static_cast<unsigned long long>(index));
  return buf;
}

namespace {

void write_failure_marker(const std::filesystem::path& out_dir, const std::string& message) {
  std::ofstream marker(out_dir / ".failed", std::ios::trunc);
  marker << message << "\n";
}

}  // namespace

GenerateResult generate_dataset(const PartCatalog& catalog, const GenerateOptions& options,
                                const std::filesystem::path& out_dir, std::ostream* progress) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::remove(out_dir / ".failed");

  const std::size_t min_pixels =
      options.min_pixels > 0 ? options.min_pixels
                             : default_min_pixels(options.render.width, options.render.height);

  // Each frame is independent given its derived seed; the pool renders
  // frames in parallel with single-threaded renders to keep both layers
  // from oversubscribing the cores.
  RenderConfig frame_render = options.render;
  frame_render.workers = 1;

  std::vector<AnnotationSet> sets(options.count);
  std::atomic<std::uint64_t> next_frame{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string first_error;

  auto run_frame = [&](std::uint64_t index) {
    const SceneSpec scene =
        sample_scene(options.variant, catalog, options.master_seed, index, options.scene);
    const RenderOutput output = render(scene, catalog, frame_render);

    write_png(out_dir / frame_image_name(index), output.rgb);
    write_png(out_dir / frame_ids_name(index), output.ids);

    std::vector<int> instance_classes;
    instance_classes.reserve(scene.instances.size());
    for (const SceneInstance& inst : scene.instances) instance_classes.push_back(inst.class_id);

    AnnotationSet set;
    set.image.id = static_cast<int>(index) + 1;
    set.image.file_name = frame_image_name(index);
    set.image.width = output.rgb.width;
    set.image.height = output.rgb.height;
    set.image.variant = to_string(options.variant);
    set.image.frame_seed = scene.frame_seed;
    set.items = annotate_ids(output.ids, instance_classes, min_pixels);
    sets[index] = std::move(set);
  };

  auto worker = [&] {
    for (std::uint64_t i = next_frame.fetch_add(1); i < options.count;
         i = next_frame.fetch_add(1)) {
      if (failed.load()) return;
      try {
        run_frame(i);
        if (progress) {
          std::lock_guard<std::mutex> lock(error_mutex);
          (*progress) << "frame " << i << " done\n";
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) {
          first_error = "frame " + std::to_string(i) + ": " + e.what();
        }
        failed.store(true);
        return;
      }
    }
  };

  int workers = options.workers > 0
                    ? options.workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(
      std::min<std::uint64_t>(std::max<std::uint64_t>(options.count, 1), workers));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (failed.load()) {
    write_failure_marker(out_dir, first_error);
    throw std::runtime_error("generate: " + first_error);
  }

  GenerateResult result;
  result.frames = options.count;
  result.coco_path = out_dir / "annotations.json";
  result.manifest_path = out_dir / "manifest.jsonl";

  try {
    const nlohmann::json coco = emit_coco(sets, catalog);
    // Stage then rename, so a crash can't leave a truncated document.
    const auto tmp = out_dir / "annotations.json.tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open " + tmp.string());
      out << coco.dump(2) << "\n";
      if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, result.coco_path);

    DatasetManifest manifest;
    manifest.seed = options.master_seed;
    for (std::uint64_t i = 0; i < options.count; ++i) {
      manifest.records.push_back(
          {frame_image_name(i), "annotations.json", options.variant});
    }
    write_manifest(manifest, result.manifest_path);
  } catch (const std::exception& e) {
    write_failure_marker(out_dir, e.what());
    throw;
  }
  return result;
}

}  // namespace synthdet
