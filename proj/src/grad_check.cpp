#include "ppgecg/grad_check.hpp"

#include <cmath>

#include "ppgecg/tape.hpp"

namespace ppgecg::ad {

namespace {

double rel_err(double ga, double gn) {
  return std::abs(ga - gn) / std::max(1.0, std::abs(ga) + std::abs(gn));
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor x,
                  double h) {
  x.set_requires_grad(true);
  x.ensure_grad();
  x.zero_grad();
  {
    Tape tape;
    Tensor loss = f(x);
    tape.backward(loss);
  }
  std::vector<double> ga = x.grad();

  x.set_requires_grad(false);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double orig = x.data()[i];
    const double hi = h * (1.0 + std::abs(orig));
    x.data()[i] = orig + hi;
    const double fp = f(x).value();
    x.data()[i] = orig - hi;
    const double fm = f(x).value();
    x.data()[i] = orig;
    const double gn = (fp - fm) / (2.0 * hi);
    worst = std::max(worst, rel_err(ga[i], gn));
  }
  return worst;
}

double grad_check_params(const std::function<Tensor()>& build_loss,
                         const std::vector<Tensor>& params, double h) {
  for (Tensor p : params) {
    p.ensure_grad();
    p.zero_grad();
  }
  {
    Tape tape;
    Tensor loss = build_loss();
    tape.backward(loss);
  }
  std::vector<std::vector<double>> ga;
  ga.reserve(params.size());
  for (const Tensor& p : params) ga.push_back(p.grad());

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor p = params[pi];
    const bool rg = p.requires_grad();
    p.set_requires_grad(false);
    for (std::size_t i = 0; i < p.data().size(); ++i) {
      const double orig = p.data()[i];
      const double hi = h * (1.0 + std::abs(orig));
      p.data()[i] = orig + hi;
      const double fp = build_loss().value();
      p.data()[i] = orig - hi;
      const double fm = build_loss().value();
      p.data()[i] = orig;
      const double gn = (fp - fm) / (2.0 * hi);
      worst = std::max(worst, rel_err(ga[pi][i], gn));
    }
    p.set_requires_grad(rg);
  }
  return worst;
}

}  // namespace ppgecg::ad
