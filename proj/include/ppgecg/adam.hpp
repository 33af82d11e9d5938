#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppgecg/tensor.hpp"

namespace ppgecg::train {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Gradients are read from
// each tensor's grad buffer (scaled by grad_scale, e.g. 1/batch) and are NOT
// cleared by step().
class Adam {
 public:
  Adam(std::vector<std::pair<std::string, ad::Tensor>> params, AdamConfig cfg);

  void step(double lr, double grad_scale = 1.0);
  void zero_grads();
  std::int64_t step_count() const { return t_; }

 private:
  struct Slot {
    std::string name;
    ad::Tensor param;
    std::vector<double> m, v;
  };
  std::vector<Slot> slots_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace ppgecg::train
