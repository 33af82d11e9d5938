#include "ppgecg/adam.hpp"

#include <cmath>

#include "ppgecg/error.hpp"

namespace ppgecg::train {

Adam::Adam(std::vector<std::pair<std::string, ad::Tensor>> params,
           AdamConfig cfg)
    : cfg_(cfg) {
  slots_.reserve(params.size());
  for (auto& [name, t] : params) {
    Slot s;
    s.name = name;
    s.param = t;
    s.m.assign(t.data().size(), 0.0);
    s.v.assign(t.data().size(), 0.0);
    slots_.push_back(std::move(s));
  }
}

void Adam::step(double lr, double grad_scale) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (Slot& s : slots_) {
    s.param.ensure_grad();
    auto& g = s.param.grad();
    auto& x = s.param.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double gi = g[i] * grad_scale;
      if (!std::isfinite(gi))
        throw UserError("adam: non-finite gradient in parameter '" + s.name +
                        "'");
      s.m[i] = cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * gi;
      s.v[i] = cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * gi * gi;
      x[i] -= lr * (s.m[i] / bc1) / (std::sqrt(s.v[i] / bc2) + cfg_.eps);
    }
  }
}

void Adam::zero_grads() {
  for (Slot& s : slots_) {
    s.param.ensure_grad();
    s.param.zero_grad();
  }
}

}  // namespace ppgecg::train
