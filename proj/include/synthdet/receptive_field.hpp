#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace synthdet {

struct ConvLayerSpec {
  int kernel = 1;
  int stride = 1;
  int padding = 0;
};

struct RfLayer {
  int receptive_field = 1;
  long long jump = 1;  // product of strides so far
  int out_w = 0;
  int out_h = 0;
};

struct RfReport {
  std::vector<RfLayer> layers;
  int final_rf = 1;
  int final_w = 0;
  int final_h = 0;
};

// r_i = r_{i-1} + (k_i - 1) * j_{i-1}, j_i = j_{i-1} * s_i; grid dims via
// out = floor((in + 2p - k) / s) + 1. Throws when a layer collapses the
// grid below 1x1.
RfReport receptive_field(std::span<const ConvLayerSpec> layers, int input_w, int input_h);

struct CoverageVerdict {
  bool covered = false;
  long long margin = 0;  // final_rf - object_extent
};

CoverageVerdict check_coverage(const RfReport& report, int object_extent);

struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major, rows*cols

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

struct DualGridValues {
  Grid grid_small;
  Grid grid_large;
};

// Mean over the concatenation of both grids: every discriminator unit
// weighs the same regardless of which grid it sits in.
double dual_grid_loss(const DualGridValues& values);

}  // namespace synthdet
