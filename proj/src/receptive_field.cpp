#include "synthdet/receptive_field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace synthdet {

namespace {

int conv_out(int in, const ConvLayerSpec& layer) {
  return (in + 2 * layer.padding - layer.kernel) / layer.stride + 1;
}

}  // namespace

RfReport receptive_field(std::span<const ConvLayerSpec> layers, int input_w, int input_h) {
  if (input_w < 1 || input_h < 1) {
    throw std::invalid_argument("receptive_field: input dims must be >= 1");
  }
  RfReport report;
  int rf = 1;
  long long jump = 1;
  int w = input_w, h = input_h;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const ConvLayerSpec& layer = layers[i];
    if (layer.kernel < 1 || layer.stride < 1 || layer.padding < 0) {
      throw std::invalid_argument("receptive_field: layer " + std::to_string(i) +
                                  " has invalid kernel/stride/padding");
    }
    w = conv_out(w, layer);
    h = conv_out(h, layer);
    if (w < 1 || h < 1) {
      throw std::invalid_argument("receptive_field: layer " + std::to_string(i) +
                                  " collapses the grid below 1x1");
    }
    rf += (layer.kernel - 1) * static_cast<int>(jump);
    jump *= layer.stride;
    report.layers.push_back({rf, jump, w, h});
  }
  report.final_rf = rf;
  report.final_w = w;
  report.final_h = h;
  return report;
}

CoverageVerdict check_coverage(const RfReport& report, int object_extent) {
  if (object_extent < 1) throw std::invalid_argument("check_coverage: extent must be >= 1");
  CoverageVerdict verdict;
  verdict.margin = static_cast<long long>(report.final_rf) - object_extent;
  verdict.covered = verdict.margin >= 0;
  return verdict;
}

double dual_grid_loss(const DualGridValues& values) {
  if (values.grid_small.values.empty() || values.grid_large.values.empty()) {
    throw std::invalid_argument("dual_grid_loss: both grids must be non-empty");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (const Grid* g : {&values.grid_small, &values.grid_large}) {
    for (double v : g->values) {
      if (!std::isfinite(v)) throw std::invalid_argument("dual_grid_loss: non-finite unit value");
      sum += v;
    }
    count += g->values.size();
  }
  return sum / static_cast<double>(count);
}

}  // namespace synthdet
