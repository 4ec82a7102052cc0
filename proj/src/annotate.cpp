#include "synthdet/annotate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace synthdet {

std::size_t InstanceMask::area() const {
  std::size_t fg = 0;
  for (std::size_t i = 1; i < rle.size(); i += 2) fg += rle[i];
  return fg;
}

std::vector<int> encode_rle(const std::vector<std::uint8_t>& bitmap, int width, int height) {
  if (bitmap.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("rle: bitmap size does not match dimensions");
  }
  std::vector<int> rle;
  int run = 0;
  bool value = false;  // encoding starts with a background run
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      const bool fg = bitmap[static_cast<std::size_t>(y) * width + x] != 0;
      if (fg == value) {
        ++run;
      } else {
        rle.push_back(run);
        run = 1;
        value = fg;
      }
    }
  }
  rle.push_back(run);
  return rle;
}

std::vector<std::uint8_t> decode_rle(const std::vector<int>& rle, int width, int height) {
  std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(width) * height, 0);
  std::size_t pos = 0;
  bool value = false;
  for (int run : rle) {
    if (run < 0) throw std::invalid_argument("rle: negative run");
    for (int k = 0; k < run; ++k) {
      if (pos >= bitmap.size()) throw std::invalid_argument("rle: runs exceed image size");
      if (value) {
        const int x = static_cast<int>(pos) / height;
        const int y = static_cast<int>(pos) % height;
        bitmap[static_cast<std::size_t>(y) * width + x] = 1;
      }
      ++pos;
    }
    value = !value;
  }
  if (pos != bitmap.size()) throw std::invalid_argument("rle: runs do not cover the image");
  return bitmap;
}

std::vector<InstanceMask> masks_from_ids(const ImageGray16& ids) {
  std::set<std::uint16_t> distinct;
  for (std::uint16_t v : ids.pixels) {
    if (v != 0) distinct.insert(v);
  }
  std::vector<InstanceMask> masks;
  masks.reserve(distinct.size());
  std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(ids.width) * ids.height);
  for (std::uint16_t id : distinct) {
    for (std::size_t i = 0; i < ids.pixels.size(); ++i) bitmap[i] = ids.pixels[i] == id ? 1 : 0;
    InstanceMask mask;
    mask.instance_id = id;
    mask.width = ids.width;
    mask.height = ids.height;
    mask.rle = encode_rle(bitmap, ids.width, ids.height);
    masks.push_back(std::move(mask));
  }
  return masks;
}

BBox bbox_from_mask(const InstanceMask& mask) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  // Walk the runs directly; position p maps to (x, y) = (p / h, p % h).
  std::size_t pos = 0;
  bool value = false;
  for (int run : mask.rle) {
    if (value) {
      for (int k = 0; k < run; ++k) {
        const int x = static_cast<int>((pos + k) / mask.height);
        const int y = static_cast<int>((pos + k) % mask.height);
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
    }
    pos += run;
    value = !value;
  }
  if (max_x < 0) throw std::invalid_argument("bbox: empty mask");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

std::vector<Annotation> filter_visibility(std::vector<Annotation> annotations,
                                          std::size_t min_pixels) {
  if (min_pixels < 1) throw std::invalid_argument("filter_visibility: min_pixels must be >= 1");
  std::erase_if(annotations,
                [min_pixels](const Annotation& a) { return a.mask.area() < min_pixels; });
  return annotations;
}

std::size_t default_min_pixels(int width, int height) {
  const double scale = static_cast<double>(width) * height / (1024.0 * 768.0);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(20.0 * scale)));
}

std::vector<Annotation> annotate_ids(const ImageGray16& ids,
                                     const std::vector<int>& instance_class_ids,
                                     std::size_t min_pixels) {
  std::vector<Annotation> annotations;
  for (InstanceMask& mask : masks_from_ids(ids)) {
    const std::size_t index = mask.instance_id;  // ids are 1-based instance indices
    if (index < 1 || index > instance_class_ids.size()) {
      throw std::out_of_range("annotate: id buffer references unknown instance " +
                              std::to_string(index));
    }
    Annotation a;
    a.class_id = instance_class_ids[index - 1];
    mask.class_id = a.class_id;
    a.bbox = bbox_from_mask(mask);
    a.mask = std::move(mask);
    annotations.push_back(std::move(a));
  }
  return filter_visibility(std::move(annotations), min_pixels);
}

nlohmann::json emit_coco(const std::vector<AnnotationSet>& sets, const PartCatalog& catalog) {
  nlohmann::json doc;
  doc["images"] = nlohmann::json::array();
  doc["annotations"] = nlohmann::json::array();
  doc["categories"] = nlohmann::json::array();

  for (const PartClass& part : catalog.classes) {
    doc["categories"].push_back({{"id", part.class_id}, {"name", part.name}});
  }

  std::set<int> image_ids;
  int annotation_id = 1;
  for (const AnnotationSet& set : sets) {
    if (!image_ids.insert(set.image.id).second) {
      throw std::invalid_argument("emit_coco: duplicate image id " +
                                  std::to_string(set.image.id));
    }
    doc["images"].push_back({{"id", set.image.id},
                             {"file_name", set.image.file_name},
                             {"width", set.image.width},
                             {"height", set.image.height},
                             {"variant", set.image.variant},
                             {"frame_seed", set.image.frame_seed}});
    for (const Annotation& a : set.items) {
      doc["annotations"].push_back(
          {{"id", annotation_id++},
           {"image_id", set.image.id},
           {"category_id", a.class_id},
           {"bbox", {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h}},
           {"segmentation",
            {{"size", {a.mask.height, a.mask.width}}, {"counts", a.mask.rle}}},
           {"area", a.mask.area()},
           {"iscrowd", 0}});
    }
  }
  return doc;
}

}  // namespace synthdet
