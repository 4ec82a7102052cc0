#include <doctest.h>

#include "synthdet/metrics.hpp"
#include "synthdet/rng.hpp"

using namespace synthdet;

namespace {

// COCO-shaped ground truth for two classes across two images.
nlohmann::json fixture_gt() {
  nlohmann::json gt;
  gt["categories"] = {{{"id", 1}, {"name", "a"}}, {{"id", 2}, {"name", "b"}}};
  gt["images"] = {{{"id", 1}}, {{"id", 2}}};
  // class 1: two boxes on image 1; class 2: one box on image 2
  gt["annotations"] = {
      {{"id", 1}, {"image_id", 1}, {"category_id", 1}, {"bbox", {0, 0, 10, 10}}},
      {{"id", 2}, {"image_id", 1}, {"category_id", 1}, {"bbox", {50, 50, 10, 10}}},
      {{"id", 3}, {"image_id", 2}, {"category_id", 2}, {"bbox", {5, 5, 20, 20}}},
  };
  return gt;
}

nlohmann::json det(int image, int cls, double x, double y, double w, double h, double score) {
  return {{"image_id", image}, {"category_id", cls}, {"bbox", {x, y, w, h}}, {"score", score}};
}

// Independent greedy matcher used as the oracle: same rule, separate code
// path operating on explicitly sorted copies.
std::vector<bool> oracle_match(std::vector<Detection> dets, std::vector<GroundTruth> gts,
                               double thr) {
  std::vector<std::pair<double, std::size_t>> keyed;
  for (std::size_t i = 0; i < dets.size(); ++i) keyed.emplace_back(-dets[i].score, i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> labels(dets.size(), false);
  for (const auto& [neg_score, idx] : keyed) {
    int pick = -1;
    double best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_used[g]) continue;
      const double o = iou(dets[idx].bbox, gts[g].bbox);
      if (o >= thr && o > best) {
        best = o;
        pick = static_cast<int>(g);
      }
    }
    if (pick >= 0) {
      gt_used[pick] = true;
      labels[idx] = true;
    }
  }
  return labels;
}

}  // namespace

TEST_CASE("iou: closed-form values") {
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == doctest::Approx(1.0));
  CHECK(iou({0, 0, 1, 1}, {5, 5, 1, 1}) == doctest::Approx(0.0));
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("match_detections: basic rules") {
  SUBCASE("single detection above threshold is a TP") {
    const auto labels = match_detections({{1, 1, {0, 0, 10, 10}, 0.9}},
                                         {{1, 1, {1, 1, 10, 10}}}, 0.5);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0]);
  }
  SUBCASE("two detections on one ground truth: higher score wins") {
    const auto labels = match_detections(
        {{1, 1, {0, 0, 10, 10}, 0.6}, {1, 1, {0, 0, 10, 10}, 0.9}},
        {{1, 1, {0, 0, 10, 10}}}, 0.5);
    REQUIRE(labels.size() == 2);
    CHECK(!labels[0]);
    CHECK(labels[1]);
  }
  SUBCASE("random cases agree with the independent greedy oracle") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<Detection> dets;
      std::vector<GroundTruth> gts;
      const int nd = static_cast<int>(rng.uniform_int(0, 6));
      const int ng = static_cast<int>(rng.uniform_int(0, 5));
      for (int i = 0; i < nd; ++i) {
        dets.push_back({1, 1,
                        {rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(2, 15),
                         rng.uniform(2, 15)},
                        rng.uniform_int(0, 4) / 4.0});  // coarse scores force ties
      }
      for (int i = 0; i < ng; ++i) {
        gts.push_back({1, 1,
                       {rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(2, 15),
                        rng.uniform(2, 15)}});
      }
      CHECK(match_detections(dets, gts, 0.5) == oracle_match(dets, gts, 0.5));
    }
  }
}

TEST_CASE("average_precision: closed forms") {
  SUBCASE("all TPs covering all ground truth reach 1.0") {
    CHECK(average_precision({true, true, true}, 3) == doctest::Approx(1.0));
  }
  SUBCASE("no detections score 0.0") {
    CHECK(average_precision({}, 4) == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed interpolation fixture: 5/6") {
    // 2 gt; labels in score order: TP, FP, TP
    CHECK(average_precision({true, false, true}, 2) ==
          doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }
  SUBCASE("appending a trailing TP never lowers AP, a trailing FP never raises it") {
    Rng rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<bool> labels;
      const int n = static_cast<int>(rng.uniform_int(1, 10));
      std::size_t tp = 0;
      for (int i = 0; i < n; ++i) {
        labels.push_back(rng.uniform() < 0.5);
        tp += labels.back();
      }
      const std::size_t gt = tp + rng.uniform_int(1, 4);  // keep recall < 1
      const double base = average_precision(labels, gt);
      auto with_tp = labels;
      with_tp.push_back(true);
      auto with_fp = labels;
      with_fp.push_back(false);
      CHECK(average_precision(with_tp, gt) >= base - 1e-12);
      CHECK(average_precision(with_fp, gt) <= base + 1e-12);
    }
  }
}

TEST_CASE("evaluate: fixtures") {
  const nlohmann::json gt = fixture_gt();

  SUBCASE("predictions equal to ground truth reach mAP 1.0") {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& ann : gt["annotations"]) {
      preds.push_back(det(ann["image_id"], ann["category_id"], ann["bbox"][0], ann["bbox"][1],
                          ann["bbox"][2], ann["bbox"][3], 1.0));
    }
    const EvalResult r = evaluate(gt, preds, 0.5);
    CHECK(r.map == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("no predictions score mAP 0.0") {
    const EvalResult r = evaluate(gt, nlohmann::json::array(), 0.5);
    CHECK(r.map == doctest::Approx(0.0));
    CHECK(r.per_class_ap.size() == 2);
  }

  SUBCASE("constructed two-class fixture evaluates to mAP 11/12") {
    // class 1: dets TP(.9), FP(.8), TP(.7) -> AP 5/6; class 2: perfect -> 1.0
    nlohmann::json preds = nlohmann::json::array();
    preds.push_back(det(1, 1, 0, 0, 10, 10, 0.9));       // TP on gt 1
    preds.push_back(det(1, 1, 100, 100, 10, 10, 0.8));   // FP
    preds.push_back(det(1, 1, 50, 50, 10, 10, 0.7));     // TP on gt 2
    preds.push_back(det(2, 2, 5, 5, 20, 20, 0.95));      // TP class 2
    const EvalResult r = evaluate(gt, preds, 0.5);
    CHECK(r.per_class_ap.at(1) == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    CHECK(r.per_class_ap.at(2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.map == doctest::Approx(11.0 / 12.0).epsilon(1e-9));
  }

  SUBCASE("unknown prediction class raises") {
    CHECK_THROWS(evaluate(gt, nlohmann::json::array({det(1, 9, 0, 0, 1, 1, 0.5)}), 0.5));
  }
  SUBCASE("unknown prediction image raises") {
    CHECK_THROWS(evaluate(gt, nlohmann::json::array({det(7, 1, 0, 0, 1, 1, 0.5)}), 0.5));
  }

  SUBCASE("relabeling images and permuting detections leaves mAP unchanged") {
    nlohmann::json preds = nlohmann::json::array();
    preds.push_back(det(1, 1, 0, 0, 10, 10, 0.9));
    preds.push_back(det(1, 1, 100, 100, 10, 10, 0.8));
    preds.push_back(det(1, 1, 50, 50, 10, 10, 0.7));
    preds.push_back(det(2, 2, 5, 5, 20, 20, 0.95));
    const double base = evaluate(gt, preds, 0.5).map;

    nlohmann::json shuffled = nlohmann::json::array();
    shuffled.push_back(preds[3]);
    shuffled.push_back(preds[2]);
    shuffled.push_back(preds[0]);
    shuffled.push_back(preds[1]);
    CHECK(evaluate(gt, shuffled, 0.5).map == doctest::Approx(base).epsilon(1e-12));

    // remap image ids 1->10, 2->20 in both documents
    nlohmann::json gt2 = gt;
    for (auto& img : gt2["images"]) img["id"] = img["id"].get<int>() * 10;
    for (auto& ann : gt2["annotations"]) ann["image_id"] = ann["image_id"].get<int>() * 10;
    nlohmann::json preds2 = preds;
    for (auto& p : preds2) p["image_id"] = p["image_id"].get<int>() * 10;
    CHECK(evaluate(gt2, preds2, 0.5).map == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("scaling all scores by a positive constant changes nothing") {
    nlohmann::json preds = nlohmann::json::array();
    preds.push_back(det(1, 1, 0, 0, 10, 10, 0.9));
    preds.push_back(det(1, 1, 100, 100, 10, 10, 0.8));
    preds.push_back(det(1, 1, 50, 50, 10, 10, 0.7));
    const double base = evaluate(gt, preds, 0.5).map;
    for (auto& p : preds) p["score"] = p["score"].get<double>() * 0.375;
    CHECK(evaluate(gt, preds, 0.5).map == doctest::Approx(base).epsilon(1e-12));
  }
}
