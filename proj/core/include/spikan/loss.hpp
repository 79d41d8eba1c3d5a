#pragma once

#include <string>
#include <vector>

#include "spikan/kanet.hpp"

namespace spikan {

struct LossWeights {
  double pde = 1.0;
  double ic = 1.0;
  double bc = 1.0;
};

struct FaceLoss {
  std::string name;
  bool initial = false;
  std::size_t points = 0;
  double mse = 0.0;
};

// total = pde*l_pde + ic*l_ic + bc*l_bc; the raw terms are always reported,
// whatever their weight.
struct LossBreakdown {
  double l_pde = 0.0;
  double l_ic = 0.0;
  double l_bc = 0.0;
  double total = 0.0;
  LossWeights weights;
  std::vector<FaceLoss> faces;
};

struct LossResult {
  LossBreakdown loss;
  ParamGrad grad;  // empty when the gradient was not requested
};

}  // namespace spikan
