#include "synthdet/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace synthdet {

double iou(const BoxD& a, const BoxD& b) {
  const double ix = std::max(a.x, b.x);
  const double iy = std::max(a.y, b.y);
  const double ix2 = std::min(a.x + a.w, b.x + b.w);
  const double iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = std::max(0.0, ix2 - ix);
  const double ih = std::max(0.0, iy2 - iy);
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<bool> match_detections(const std::vector<Detection>& detections,
                                   const std::vector<GroundTruth>& ground_truths,
                                   double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (detections[a].score != detections[b].score) {
      return detections[a].score > detections[b].score;
    }
    return a < b;
  });

  std::vector<bool> matched_gt(ground_truths.size(), false);
  std::vector<bool> tp(detections.size(), false);
  for (std::size_t idx : order) {
    double best_iou = -1.0;
    int best_gt = -1;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (matched_gt[g]) continue;
      const double overlap = iou(detections[idx].bbox, ground_truths[g].bbox);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      matched_gt[best_gt] = true;
      tp[idx] = true;
    }
  }
  return tp;
}

double average_precision(const std::vector<bool>& tp_flags, std::size_t gt_count) {
  if (gt_count < 1) throw std::invalid_argument("average_precision: gt_count must be >= 1");
  if (tp_flags.empty()) return 0.0;

  std::vector<double> precision(tp_flags.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < tp_flags.size(); ++k) {
    if (tp_flags[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // All-point interpolation: precision at recall r is the max precision at
  // any recall >= r.
  for (std::size_t k = precision.size() - 1; k > 0; --k) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  const double recall_step = 1.0 / static_cast<double>(gt_count);
  for (std::size_t k = 0; k < tp_flags.size(); ++k) {
    if (tp_flags[k]) ap += recall_step * precision[k];
  }
  return ap;
}

namespace {

BoxD parse_box(const nlohmann::json& bbox) {
  if (!bbox.is_array() || bbox.size() != 4) {
    throw std::invalid_argument("metrics: bbox must be [x, y, w, h]");
  }
  return {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
          bbox[3].get<double>()};
}

}  // namespace

EvalResult evaluate(const nlohmann::json& gt, const nlohmann::json& predictions,
                    double iou_threshold) {
  std::set<int> known_classes;
  for (const auto& cat : gt.at("categories")) known_classes.insert(cat.at("id").get<int>());
  std::set<int> known_images;
  for (const auto& img : gt.at("images")) known_images.insert(img.at("id").get<int>());

  // class -> image -> boxes
  std::map<int, std::map<int, std::vector<GroundTruth>>> gt_by_class;
  std::map<int, std::size_t> gt_counts;
  for (const auto& ann : gt.at("annotations")) {
    GroundTruth g;
    g.image_id = ann.at("image_id").get<int>();
    g.class_id = ann.at("category_id").get<int>();
    g.bbox = parse_box(ann.at("bbox"));
    gt_by_class[g.class_id][g.image_id].push_back(g);
    ++gt_counts[g.class_id];
  }

  std::map<int, std::vector<Detection>> dets_by_class;  // in input order
  for (const auto& pred : predictions) {
    Detection d;
    d.image_id = pred.at("image_id").get<int>();
    d.class_id = pred.at("category_id").get<int>();
    d.bbox = parse_box(pred.at("bbox"));
    d.score = pred.at("score").get<double>();
    if (!known_classes.count(d.class_id)) {
      throw std::invalid_argument("metrics: prediction references unknown class id " +
                                  std::to_string(d.class_id));
    }
    if (!known_images.count(d.image_id)) {
      throw std::invalid_argument("metrics: prediction references unknown image id " +
                                  std::to_string(d.image_id));
    }
    dets_by_class[d.class_id].push_back(d);
  }

  EvalResult result;
  result.iou_threshold = iou_threshold;
  double ap_sum = 0.0;
  for (const auto& [class_id, count] : gt_counts) {
    const auto dets_it = dets_by_class.find(class_id);
    double ap = 0.0;
    if (dets_it != dets_by_class.end() && !dets_it->second.empty()) {
      const std::vector<Detection>& dets = dets_it->second;
      std::vector<std::size_t> order(dets.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
        return a < b;
      });

      auto& gt_images = gt_by_class[class_id];
      std::map<int, std::vector<bool>> matched;
      for (auto& [img, boxes] : gt_images) matched[img].assign(boxes.size(), false);

      std::vector<bool> tp_sorted;
      tp_sorted.reserve(dets.size());
      for (std::size_t idx : order) {
        const Detection& d = dets[idx];
        bool is_tp = false;
        const auto img_it = gt_images.find(d.image_id);
        if (img_it != gt_images.end()) {
          double best_iou = -1.0;
          int best = -1;
          auto& flags = matched[d.image_id];
          for (std::size_t g = 0; g < img_it->second.size(); ++g) {
            if (flags[g]) continue;
            const double overlap = iou(d.bbox, img_it->second[g].bbox);
            if (overlap >= iou_threshold && overlap > best_iou) {
              best_iou = overlap;
              best = static_cast<int>(g);
            }
          }
          if (best >= 0) {
            flags[best] = true;
            is_tp = true;
          }
        }
        tp_sorted.push_back(is_tp);
      }
      ap = average_precision(tp_sorted, count);
    }
    result.per_class_ap[class_id] = ap;
    ap_sum += ap;
  }
  result.map = gt_counts.empty() ? 0.0 : ap_sum / static_cast<double>(gt_counts.size());
  return result;
}

}  // namespace synthdet
