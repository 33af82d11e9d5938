#pragma once

#include <functional>
#include <optional>

#include "ppgecg/model.hpp"

namespace ppgecg::train {

// Group sparsity of the fused and first-layer feature maps: sum of row and
// column L2 norms of each.
ad::Tensor sparsity_loss(const ad::Tensor& fstar, const ad::Tensor& f1);

struct LossWeights {
  double lambda_d = 0.1;
  double lambda_s = 5e-6;
};

struct JointLossParts {
  ad::Tensor total;
  double rec = 0.0;     // squared reconstruction error
  double ce = 0.0;      // unweighted cross-entropy
  double sparse = 0.0;  // unweighted sparsity
};

// ||ecg_hat - ecg||^2 + lambda_d * CE(probs, label) + lambda_s * sparsity.
// Without a label (or without a diagnosis branch) the CE term is dropped.
JointLossParts joint_loss(const net::ForwardOutputs& out,
                          const std::vector<double>& ecg,
                          std::optional<int> label, int n_classes,
                          const LossWeights& w);

// ||x - g_back(g_fwd(x))||^2 for an unpaired cycle.
ad::Tensor cycle_loss(const std::vector<double>& x,
                      const std::function<ad::Tensor(const ad::Tensor&)>& g_fwd,
                      const std::function<ad::Tensor(const ad::Tensor&)>& g_back);

}  // namespace ppgecg::train
