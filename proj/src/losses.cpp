#include "ppgecg/losses.hpp"

#include "ppgecg/error.hpp"

namespace ppgecg::train {

using ad::Tensor;

Tensor sparsity_loss(const Tensor& fstar, const Tensor& f1) {
  return ad::add(ad::group_sparsity(fstar), ad::group_sparsity(f1));
}

JointLossParts joint_loss(const net::ForwardOutputs& out,
                          const std::vector<double>& ecg,
                          std::optional<int> label, int n_classes,
                          const LossWeights& w) {
  if (static_cast<int>(ecg.size()) != out.ecg_hat.dim(0))
    throw UserError("joint_loss: ECG length mismatch");
  Tensor target({static_cast<int>(ecg.size())}, ecg);
  Tensor rec = ad::sse(out.ecg_hat, target);
  Tensor sparse = sparsity_loss(out.fstar, out.f1);

  JointLossParts parts;
  parts.rec = rec.value();
  parts.sparse = sparse.value();
  Tensor total = ad::add(rec, ad::scale(sparse, w.lambda_s));
  if (label && out.class_probs.defined()) {
    if (*label < 0 || *label >= n_classes)
      throw UserError("joint_loss: label out of range");
    Tensor onehot({n_classes}, 0.0);
    onehot.data()[static_cast<std::size_t>(*label)] = 1.0;
    Tensor ce = ad::cross_entropy(out.class_probs, onehot);
    parts.ce = ce.value();
    total = ad::add(total, ad::scale(ce, w.lambda_d));
  }
  parts.total = total;
  return parts;
}

Tensor cycle_loss(const std::vector<double>& x,
                  const std::function<Tensor(const Tensor&)>& g_fwd,
                  const std::function<Tensor(const Tensor&)>& g_back) {
  Tensor input({static_cast<int>(x.size())}, x);
  Tensor round_trip = g_back(g_fwd(input));
  return ad::sse(round_trip, input);
}

}  // namespace ppgecg::train
