#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "synthdet/catalog.hpp"
#include "synthdet/image.hpp"

namespace synthdet {

// Column-major run-length encoded instance mask. Runs alternate
// background/foreground starting with the (possibly zero) background run,
// matching the common COCO uncompressed convention.
struct InstanceMask {
  std::uint16_t instance_id = 0;
  int class_id = 0;
  int width = 0;
  int height = 0;
  std::vector<int> rle;

  std::size_t area() const;
};

// Integer pixel box; (x, y) is the top-left pixel, both edges inclusive,
// so w and h are at least 1.
struct BBox {
  int x = 0, y = 0, w = 0, h = 0;
};

struct Annotation {
  InstanceMask mask;
  BBox bbox;
  int class_id = 0;
};

struct ImageInfo {
  int id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::string variant;
  std::uint64_t frame_seed = 0;
};

struct AnnotationSet {
  ImageInfo image;
  std::vector<Annotation> items;
};

// One mask per distinct nonzero id, in ascending id order. Masks are
// pairwise disjoint and cover exactly the nonzero pixels. class_id is
// left 0 for the caller to fill.
std::vector<InstanceMask> masks_from_ids(const ImageGray16& ids);

// bitmap is row-major width*height, nonzero = foreground; the scan order
// of the encoding is column-major.
std::vector<int> encode_rle(const std::vector<std::uint8_t>& bitmap, int width, int height);
std::vector<std::uint8_t> decode_rle(const std::vector<int>& rle, int width, int height);

BBox bbox_from_mask(const InstanceMask& mask);  // throws on an empty mask

// Drops instances whose visible area is below min_pixels.
std::vector<Annotation> filter_visibility(std::vector<Annotation> annotations,
                                          std::size_t min_pixels);

// 20 px at 1024x768, scaled by pixel count elsewhere (at least 1).
std::size_t default_min_pixels(int width, int height);

// COCO-style document: images / annotations / categories, with object
// keys serialized in sorted order so identical inputs give identical
// bytes.
nlohmann::json emit_coco(const std::vector<AnnotationSet>& sets, const PartCatalog& catalog);

std::vector<Annotation> annotate_ids(const ImageGray16& ids,
                                     const std::vector<int>& instance_class_ids,
                                     std::size_t min_pixels);

}  // namespace synthdet
