#include <doctest.h>

#include "synthdet/annotate.hpp"
#include "synthdet/rng.hpp"
#include "test_util.hpp"

using namespace synthdet;

namespace {

// Independent straight-loop decoder used as the round-trip oracle.
std::vector<std::uint8_t> naive_decode(const std::vector<int>& rle, int width, int height) {
  std::vector<std::uint8_t> colmajor;
  bool value = false;
  for (int run : rle) {
    for (int k = 0; k < run; ++k) colmajor.push_back(value ? 1 : 0);
    value = !value;
  }
  REQUIRE(colmajor.size() == static_cast<std::size_t>(width) * height);
  std::vector<std::uint8_t> rowmajor(colmajor.size());
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      rowmajor[static_cast<std::size_t>(y) * width + x] =
          colmajor[static_cast<std::size_t>(x) * height + y];
    }
  }
  return rowmajor;
}

}  // namespace

TEST_CASE("encode_rle: spec examples") {
  SUBCASE("all-zero 2x2 encodes to [4]") {
    CHECK(encode_rle({0, 0, 0, 0}, 2, 2) == std::vector<int>{4});
  }
  SUBCASE("single foreground pixel at column-major position 0 gives [0,1,3]") {
    // column-major position 0 = pixel (x=0, y=0)
    CHECK(encode_rle({1, 0, 0, 0}, 2, 2) == std::vector<int>{0, 1, 3});
  }
  SUBCASE("runs alternate starting with background and sum to w*h") {
    Rng rng(6);
    for (int trial = 0; trial < 1000; ++trial) {
      const int w = static_cast<int>(rng.uniform_int(1, 12));
      const int h = static_cast<int>(rng.uniform_int(1, 12));
      std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(w) * h);
      for (auto& b : bitmap) b = rng.uniform() < 0.4 ? 1 : 0;
      const auto rle = encode_rle(bitmap, w, h);
      int total = 0;
      for (int run : rle) total += run;
      CHECK(total == w * h);
      CHECK(decode_rle(rle, w, h) == bitmap);
      CHECK(naive_decode(rle, w, h) == bitmap);
    }
  }
}

TEST_CASE("masks_from_ids: spec examples") {
  SUBCASE("all-zero buffer gives no masks") {
    ImageGray16 ids(3, 3);
    CHECK(masks_from_ids(ids).empty());
  }
  SUBCASE("2x2 buffer with two single-pixel instances") {
    ImageGray16 ids(2, 2);
    ids.at(0, 0) = 1;
    ids.at(1, 1) = 2;
    const auto masks = masks_from_ids(ids);
    REQUIRE(masks.size() == 2);
    CHECK(masks[0].instance_id == 1);
    CHECK(masks[0].area() == 1);
    CHECK(masks[1].instance_id == 2);
    CHECK(masks[1].area() == 1);
  }
  SUBCASE("masks are disjoint and cover exactly the nonzero pixels") {
    Rng rng(7);
    ImageGray16 ids(37, 23);
    for (auto& p : ids.pixels) {
      p = rng.uniform() < 0.5 ? 0 : static_cast<std::uint16_t>(rng.uniform_int(1, 5));
    }
    std::size_t nonzero = 0;
    for (auto p : ids.pixels) nonzero += p != 0;
    const auto masks = masks_from_ids(ids);
    std::size_t total_area = 0;
    std::vector<int> coverage(ids.pixels.size(), 0);
    for (const auto& mask : masks) {
      total_area += mask.area();
      const auto bitmap = decode_rle(mask.rle, mask.width, mask.height);
      for (std::size_t i = 0; i < bitmap.size(); ++i) {
        if (bitmap[i]) {
          ++coverage[i];
          CHECK(ids.pixels[i] == mask.instance_id);
        }
      }
    }
    CHECK(total_area == nonzero);
    for (std::size_t i = 0; i < coverage.size(); ++i) {
      CHECK(coverage[i] == (ids.pixels[i] != 0 ? 1 : 0));
    }
  }
}

TEST_CASE("bbox_from_mask: tight bounds") {
  SUBCASE("two pixels span the box") {
    std::vector<std::uint8_t> bitmap(6 * 7, 0);
    bitmap[3 * 6 + 2] = 1;  // (2,3)
    bitmap[5 * 6 + 4] = 1;  // (4,5)
    InstanceMask mask;
    mask.width = 6;
    mask.height = 7;
    mask.rle = encode_rle(bitmap, 6, 7);
    const BBox box = bbox_from_mask(mask);
    CHECK(box.x == 2);
    CHECK(box.y == 3);
    CHECK(box.w == 3);
    CHECK(box.h == 3);
  }
  SUBCASE("single pixel at the origin") {
    std::vector<std::uint8_t> bitmap(4 * 4, 0);
    bitmap[0] = 1;
    InstanceMask mask;
    mask.width = 4;
    mask.height = 4;
    mask.rle = encode_rle(bitmap, 4, 4);
    const BBox box = bbox_from_mask(mask);
    CHECK(box.x == 0);
    CHECK(box.y == 0);
    CHECK(box.w == 1);
    CHECK(box.h == 1);
  }
  SUBCASE("random masks: nothing outside the box, every edge touched") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const int w = static_cast<int>(rng.uniform_int(2, 20));
      const int h = static_cast<int>(rng.uniform_int(2, 20));
      std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(w) * h, 0);
      bool any = false;
      for (auto& b : bitmap) {
        b = rng.uniform() < 0.2 ? 1 : 0;
        any |= b != 0;
      }
      if (!any) continue;
      InstanceMask mask;
      mask.width = w;
      mask.height = h;
      mask.rle = encode_rle(bitmap, w, h);
      const BBox box = bbox_from_mask(mask);
      bool left = false, right = false, top = false, bottom = false;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!bitmap[static_cast<std::size_t>(y) * w + x]) continue;
          CHECK(x >= box.x);
          CHECK(x < box.x + box.w);
          CHECK(y >= box.y);
          CHECK(y < box.y + box.h);
          left |= x == box.x;
          right |= x == box.x + box.w - 1;
          top |= y == box.y;
          bottom |= y == box.y + box.h - 1;
        }
      }
      CHECK(left);
      CHECK(right);
      CHECK(top);
      CHECK(bottom);
    }
  }
  SUBCASE("empty mask raises") {
    InstanceMask mask;
    mask.width = 3;
    mask.height = 3;
    mask.rle = {9};
    CHECK_THROWS(bbox_from_mask(mask));
  }
}

TEST_CASE("filter_visibility: thresholds") {
  auto make_ann = [](std::size_t pixels) {
    Annotation a;
    a.mask.width = 10;
    a.mask.height = 10;
    std::vector<std::uint8_t> bitmap(100, 0);
    for (std::size_t i = 0; i < pixels; ++i) bitmap[i] = 1;
    a.mask.rle = encode_rle(bitmap, 10, 10);
    return a;
  };
  SUBCASE("min_pixels 1 is the identity") {
    const auto kept = filter_visibility({make_ann(1), make_ann(50)}, 1);
    CHECK(kept.size() == 2);
  }
  SUBCASE("49 pixels fall below a threshold of 50") {
    const auto kept = filter_visibility({make_ann(49), make_ann(50)}, 50);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].mask.area() == 50);
  }
  SUBCASE("fully occluded instances disappear from the id buffer upstream") {
    // an id that never appears in the buffer simply yields no mask
    ImageGray16 ids(4, 4);
    ids.at(1, 1) = 2;  // instance 1 is fully hidden
    const auto anns = annotate_ids(ids, {5, 6}, 1);
    REQUIRE(anns.size() == 1);
    CHECK(anns[0].class_id == 6);
  }
}

TEST_CASE("default_min_pixels scales with resolution") {
  CHECK(default_min_pixels(1024, 768) == 20);
  CHECK(default_min_pixels(512, 384) == 5);
  CHECK(default_min_pixels(64, 48) >= 1);
}

TEST_CASE("emit_coco: document shape and byte determinism") {
  const PartCatalog& catalog = testutil::demo_catalog();
  SUBCASE("empty input still carries the 12 categories") {
    const auto doc = emit_coco({}, catalog);
    CHECK(doc["categories"].size() == 12);
    CHECK(doc["images"].empty());
    CHECK(doc["annotations"].empty());
  }
  SUBCASE("one image, one instance, area = mask pixel count") {
    ImageGray16 ids(8, 8);
    for (int x = 2; x < 5; ++x)
      for (int y = 1; y < 4; ++y) ids.at(x, y) = 1;
    AnnotationSet set;
    set.image = {1, "frame_000000.png", 8, 8, "fix", 42};
    set.items = annotate_ids(ids, {3}, 1);
    const auto doc = emit_coco({set}, catalog);
    REQUIRE(doc["annotations"].size() == 1);
    CHECK(doc["annotations"][0]["area"] == 9);
    CHECK(doc["annotations"][0]["category_id"] == 3);
    CHECK(doc["annotations"][0]["iscrowd"] == 0);
    CHECK(doc["annotations"][0]["bbox"] == nlohmann::json({2, 1, 3, 3}));
    CHECK(doc["images"][0]["frame_seed"] == 42);

    const auto doc2 = emit_coco({set}, catalog);
    CHECK(doc.dump(2) == doc2.dump(2));
  }
  SUBCASE("duplicate image ids are rejected") {
    AnnotationSet a, b;
    a.image.id = b.image.id = 7;
    CHECK_THROWS(emit_coco({a, b}, catalog));
  }
}
