#include "ppgecg/tape.hpp"

#include <algorithm>

namespace ppgecg::ad {

namespace {
thread_local Tape* t_current = nullptr;
}

Tape::Tape() : prev_(t_current) { t_current = this; }

Tape::~Tape() { t_current = prev_; }

Tape* Tape::current() { return t_current; }

void Tape::record(std::shared_ptr<TensorImpl> out, std::function<void()> backfn) {
  entries_.push_back({std::move(out), std::move(backfn)});
}

void Tape::backward(const Tensor& loss) {
  if (!loss.is_scalar())
    throw UserError("backward: loss must be a scalar tensor");
  backward_seed(loss, {1.0});
}

void Tape::backward_seed(const Tensor& out, const std::vector<double>& seed) {
  if (seed.size() != out.data().size())
    throw UserError("backward_seed: seed length does not match output");
  // Non-leaf gradients are transient state of this walk; leaves keep theirs.
  for (auto& e : entries_) {
    e.out->ensure_grad();
    std::fill(e.out->grad.begin(), e.out->grad.end(), 0.0);
  }
  auto out_impl = out.impl();
  out_impl->ensure_grad();
  for (std::size_t i = 0; i < seed.size(); ++i) out_impl->grad[i] += seed[i];
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) it->backfn();
}

}  // namespace ppgecg::ad
