#pragma once

#include <functional>
#include <vector>

#include "ppgecg/tensor.hpp"

namespace ppgecg::ad {

// Compares the taped gradient of a scalar-valued function against central
// finite differences, coordinate by coordinate, with per-coordinate step
// h * (1 + |x_i|). Returns max_i |g_a - g_n| / max(1, |g_a| + |g_n|).
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor x,
                  double h = 1e-5);

// Same check for a loss that closes over a parameter set: `build_loss` must
// construct the scalar loss from the current parameter values (recording onto
// the active tape when one exists).
double grad_check_params(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& params, double h = 1e-5);

}  // namespace ppgecg::ad
