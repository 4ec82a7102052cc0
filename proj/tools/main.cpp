#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthdet/composer.hpp"
#include "synthdet/metrics.hpp"
#include "synthdet/pipeline.hpp"
#include "synthdet/receptive_field.hpp"

namespace {

using namespace synthdet;

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json doc;
  in >> doc;
  return doc;
}

std::filesystem::path resolve_catalog_path(const std::filesystem::path& given) {
  if (std::filesystem::is_directory(given)) return given / "catalog.json";
  return given;
}

// Fills generation options from the config document; command-line flags
// are applied afterwards and win.
void apply_config(const nlohmann::json& cfg, GenerateOptions& opt) {
  if (cfg.contains("variant")) opt.variant = variant_from_string(cfg["variant"].get<std::string>());
  if (cfg.contains("count")) opt.count = cfg["count"].get<std::uint64_t>();
  if (cfg.contains("master_seed")) opt.master_seed = cfg["master_seed"].get<std::uint64_t>();
  if (cfg.contains("width")) opt.render.width = cfg["width"].get<int>();
  if (cfg.contains("height")) opt.render.height = cfg["height"].get<int>();
  if (cfg.contains("samples_per_pixel")) opt.render.samples_per_pixel = cfg["samples_per_pixel"].get<int>();
  if (cfg.contains("max_reflection_depth")) opt.render.max_reflection_depth = cfg["max_reflection_depth"].get<int>();
  if (cfg.contains("fov_deg")) opt.render.fov_deg = cfg["fov_deg"].get<double>();
  if (cfg.contains("workers")) opt.workers = cfg["workers"].get<int>();
  if (cfg.contains("max_per_class")) opt.scene.max_per_class = cfg["max_per_class"].get<int>();
  if (cfg.contains("min_pixels")) opt.min_pixels = cfg["min_pixels"].get<std::size_t>();
  if (cfg.contains("light_count")) {
    opt.scene.light_count_min = cfg["light_count"][0].get<int>();
    opt.scene.light_count_max = cfg["light_count"][1].get<int>();
  }
  if (cfg.contains("light_intensity")) {
    opt.scene.light_intensity_min = cfg["light_intensity"][0].get<double>();
    opt.scene.light_intensity_max = cfg["light_intensity"][1].get<double>();
  }
  if (cfg.contains("camera_prism")) {
    const auto& p = cfg["camera_prism"];
    if (p.contains("half_side")) opt.scene.camera_prism.half_side = p["half_side"].get<double>();
    if (p.contains("z_min")) opt.scene.camera_prism.z_min = p["z_min"].get<double>();
    if (p.contains("z_max")) opt.scene.camera_prism.z_max = p["z_max"].get<double>();
  }
  if (cfg.contains("settle")) {
    const auto& s = cfg["settle"];
    SettleParams& sp = opt.scene.settle;
    if (s.contains("dt")) sp.dt = s["dt"].get<double>();
    if (s.contains("restitution")) sp.restitution = s["restitution"].get<double>();
    if (s.contains("friction")) sp.friction = s["friction"].get<double>();
    if (s.contains("rest_lin_speed")) sp.rest_lin_speed = s["rest_lin_speed"].get<double>();
    if (s.contains("rest_ang_speed")) sp.rest_ang_speed = s["rest_ang_speed"].get<double>();
    if (s.contains("max_steps")) sp.max_steps = s["max_steps"].get<int>();
    if (s.contains("max_penetration")) sp.max_penetration = s["max_penetration"].get<double>();
  }
}

int cmd_generate(const std::string& variant_name, std::uint64_t count, std::uint64_t seed,
                 const std::string& catalog_path, const std::string& out_dir,
                 const GenerateOptions& base) {
  GenerateOptions opt = base;
  opt.variant = variant_from_string(variant_name);
  opt.count = count;
  opt.master_seed = seed;
  const PartCatalog catalog = load_catalog(resolve_catalog_path(catalog_path));
  const GenerateResult result = generate_dataset(catalog, opt, out_dir, &std::cerr);
  std::cerr << "wrote " << result.frames << " frame(s) to " << out_dir << "\n";
  return 0;
}

int cmd_compose(const std::string& spec_path, const std::string& out_path) {
  const nlohmann::json doc = load_json(spec_path);
  MixSpec spec;
  spec.total = doc.at("total").get<std::uint64_t>();
  spec.seed = doc.value("seed", std::uint64_t{0});
  const auto base = std::filesystem::path(spec_path).parent_path();
  for (const auto& comp : doc.at("components")) {
    MixComponent c;
    c.name = comp.at("manifest").get<std::string>();
    std::filesystem::path manifest_path = c.name;
    if (manifest_path.is_relative()) manifest_path = base / manifest_path;
    c.source = read_manifest(manifest_path);
    c.fraction = comp.at("fraction").get<double>();
    spec.components.push_back(std::move(c));
  }
  const DatasetManifest mixed = compose(spec);
  write_manifest(mixed, out_path);
  std::cerr << "composed " << mixed.records.size() << " record(s) into " << out_path << "\n";
  return 0;
}

int cmd_crops(const std::string& manifest_path, int size, int per_image, std::uint64_t seed,
              const std::string& out_dir) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  CropConfig config{size, per_image, seed};
  const auto files = extract_crops(manifest, config, out_dir);
  std::cerr << "wrote " << files.size() << " crop(s) to " << out_dir << "\n";
  return 0;
}

int cmd_analyze_rf(const std::string& arch_path, int input_w, int input_h, int object_extent) {
  const nlohmann::json doc = load_json(arch_path);
  std::vector<ConvLayerSpec> layers;
  for (const auto& l : doc) {
    layers.push_back({l.at("kernel").get<int>(), l.at("stride").get<int>(),
                      l.value("padding", 0)});
  }
  const RfReport report = receptive_field(layers, input_w, input_h);
  std::cout << "layer  kernel stride pad   rf      jump    grid\n";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const RfLayer& r = report.layers[i];
    std::cout << std::setw(5) << i + 1 << std::setw(8) << layers[i].kernel << std::setw(7)
              << layers[i].stride << std::setw(4) << layers[i].padding << std::setw(6)
              << r.receptive_field << std::setw(10) << r.jump << "    " << r.out_w << "x"
              << r.out_h << "\n";
  }
  std::cout << "final receptive field: " << report.final_rf << " px, grid " << report.final_w
            << "x" << report.final_h << "\n";
  if (object_extent > 0) {
    const CoverageVerdict verdict = check_coverage(report, object_extent);
    std::cout << "object extent " << object_extent << " px: "
              << (verdict.covered ? "COVERED" : "NOT COVERED") << " (margin " << verdict.margin
              << ")\n";
  }
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, double iou_threshold) {
  const EvalResult result = evaluate(load_json(gt_path), load_json(pred_path), iou_threshold);
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& [class_id, ap] : result.per_class_ap) {
    std::cout << "class " << class_id << " AP " << ap << "\n";
  }
  std::cout << "mAP " << result.map << "\n";
  return 0;
}

int cmd_stats(const std::string& manifest_path) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  std::map<std::string, std::size_t> histogram;
  for (const ManifestRecord& r : manifest.records) ++histogram[to_string(r.variant)];
  std::cout << "records: " << manifest.records.size() << "\n";
  for (const auto& [variant, count] : histogram) {
    std::cout << variant << ": " << count << "\n";
  }
  return 0;
}

int cmd_ingest(const std::string& dir, const std::string& variant_name,
               const std::string& out_path) {
  const DatasetManifest manifest = ingest_external(dir, variant_from_string(variant_name));
  write_manifest(manifest, out_path);
  std::cerr << "ingested " << manifest.records.size() << " record(s) into " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthdet: deterministic synthetic dataset generator for object detection"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Render a synthetic dataset variant");
  std::string g_variant = "rand_tex";
  std::uint64_t g_count = 0, g_seed = 0;
  std::string g_catalog, g_out, g_config;
  GenerateOptions g_opt;
  generate->add_option("--variant", g_variant, "fix | rand_no_tex | rand_tex");
  auto* g_count_opt = generate->add_option("--count", g_count, "number of frames");
  auto* g_seed_opt = generate->add_option("--seed", g_seed, "master seed (default 0)");
  generate->add_option("--catalog", g_catalog, "catalog manifest (file or directory)")
      ->required();
  generate->add_option("--out", g_out, "output directory")->required();
  generate->add_option("--config", g_config, "JSON config file; flags override it");
  auto* g_width = generate->add_option("--width", g_opt.render.width, "image width");
  auto* g_height = generate->add_option("--height", g_opt.render.height, "image height");
  auto* g_spp = generate->add_option("--spp", g_opt.render.samples_per_pixel, "samples per pixel");
  auto* g_workers = generate->add_option("--workers", g_opt.workers, "frame worker count");
  auto* g_variant_opt = generate->get_option("--variant");

  // compose
  auto* compose_cmd = app.add_subcommand("compose", "Mix manifests at given fractions");
  std::string c_spec, c_out;
  compose_cmd->add_option("--spec", c_spec, "mix spec JSON")->required();
  compose_cmd->add_option("--out", c_out, "output manifest path")->required();

  // crops
  auto* crops_cmd = app.add_subcommand("crops", "Extract random square crops");
  std::string cr_manifest, cr_out;
  int cr_size = 256, cr_per_image = 4;
  std::uint64_t cr_seed = 0;
  crops_cmd->add_option("--manifest", cr_manifest, "input manifest (jsonl)")->required();
  crops_cmd->add_option("--out", cr_out, "output directory")->required();
  crops_cmd->add_option("--size", cr_size, "crop side in pixels (default 256)");
  crops_cmd->add_option("--per-image", cr_per_image, "crops per image (default 4)");
  crops_cmd->add_option("--seed", cr_seed, "seed (default 0)");

  // analyze-rf
  auto* rf_cmd = app.add_subcommand("analyze-rf", "Receptive-field report for a conv stack");
  std::string rf_arch;
  int rf_w = 256, rf_h = 256, rf_extent = 0;
  rf_cmd->add_option("--arch", rf_arch, "architecture JSON: [{kernel,stride,padding}...]")
      ->required();
  rf_cmd->add_option("--input-width", rf_w, "input width (default 256)");
  rf_cmd->add_option("--input-height", rf_h, "input height (default 256)");
  rf_cmd->add_option("--object-extent", rf_extent, "largest object extent to check coverage");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Detection mAP at a fixed IoU threshold");
  std::string e_gt, e_pred;
  double e_iou = 0.5;
  eval_cmd->add_option("--gt", e_gt, "ground-truth COCO JSON")->required();
  eval_cmd->add_option("--pred", e_pred, "predictions JSON")->required();
  eval_cmd->add_option("--iou", e_iou, "IoU threshold (default 0.5)");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Variant histogram of a manifest");
  std::string s_manifest;
  stats_cmd->add_option("--manifest", s_manifest, "manifest path")->required();

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Manifest for externally refined images");
  std::string i_dir, i_variant = "fix_refined", i_out;
  ingest_cmd->add_option("--dir", i_dir, "directory of images + same-stem annotations")
      ->required();
  ingest_cmd->add_option("--variant", i_variant, "variant tag (default fix_refined)");
  ingest_cmd->add_option("--out", i_out, "output manifest path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      if (!g_config.empty()) {
        nlohmann::json cfg = load_json(g_config);
        GenerateOptions from_config;
        apply_config(cfg, from_config);
        // flags not given fall back to config values
        if (!g_variant_opt->count() && cfg.contains("variant")) {
          g_variant = cfg["variant"].get<std::string>();
        }
        if (!g_count_opt->count()) g_count = from_config.count;
        if (!g_seed_opt->count()) g_seed = from_config.master_seed;
        if (!g_width->count()) g_opt.render.width = from_config.render.width;
        if (!g_height->count()) g_opt.render.height = from_config.render.height;
        if (!g_spp->count()) g_opt.render.samples_per_pixel = from_config.render.samples_per_pixel;
        if (!g_workers->count()) g_opt.workers = from_config.workers;
        g_opt.render.max_reflection_depth = from_config.render.max_reflection_depth;
        g_opt.render.fov_deg = from_config.render.fov_deg;
        g_opt.scene = from_config.scene;
        g_opt.min_pixels = from_config.min_pixels;
      }
      return cmd_generate(g_variant, g_count, g_seed, g_catalog, g_out, g_opt);
    }
    if (compose_cmd->parsed()) return cmd_compose(c_spec, c_out);
    if (crops_cmd->parsed()) return cmd_crops(cr_manifest, cr_size, cr_per_image, cr_seed, cr_out);
    if (rf_cmd->parsed()) return cmd_analyze_rf(rf_arch, rf_w, rf_h, rf_extent);
    if (eval_cmd->parsed()) return cmd_eval(e_gt, e_pred, e_iou);
    if (stats_cmd->parsed()) return cmd_stats(s_manifest);
    if (ingest_cmd->parsed()) return cmd_ingest(i_dir, i_variant, i_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
