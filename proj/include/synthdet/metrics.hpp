#pragma once

#include <map>
#include <vector>

#include <json.hpp>

namespace synthdet {

// Continuous [x, y, w, h] box, the COCO detection convention.
struct BoxD {
  double x = 0, y = 0, w = 0, h = 0;
};

double iou(const BoxD& a, const BoxD& b);

struct Detection {
  int image_id = 0;
  int class_id = 0;
  BoxD bbox;
  double score = 0.0;
};

struct GroundTruth {
  int image_id = 0;
  int class_id = 0;
  BoxD bbox;
};

// Greedy matching within one (image, class) group: detections by
// descending score (ties: input order), each taking the unmatched ground
// truth of highest IoU >= threshold. Returns one TP/FP flag per detection
// in the input order.
std::vector<bool> match_detections(const std::vector<Detection>& detections,
                                   const std::vector<GroundTruth>& ground_truths,
                                   double iou_threshold);

// All-point interpolated average precision. tp_flags must already be in
// descending-score order.
double average_precision(const std::vector<bool>& tp_flags, std::size_t gt_count);

struct EvalResult {
  std::map<int, double> per_class_ap;  // classes present in the ground truth
  double map = 0.0;
  double iou_threshold = 0.5;
};

// gt: COCO-style document (as emitted by the annotation stage).
// predictions: array of {image_id, category_id, bbox, score}.
EvalResult evaluate(const nlohmann::json& gt, const nlohmann::json& predictions,
                    double iou_threshold = 0.5);

}  // namespace synthdet
