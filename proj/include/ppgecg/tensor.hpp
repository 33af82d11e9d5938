#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ppgecg/error.hpp"

namespace ppgecg::ad {

struct TensorImpl {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;

  std::int64_t numel() const {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
  }

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

// Value-semantics handle to a shared buffer. Copying a Tensor aliases the
// underlying storage; ops never mutate their inputs.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape, double fill = 0.0,
                  bool requires_grad = false)
      : impl_(std::make_shared<TensorImpl>()) {
    impl_->shape = std::move(shape);
    impl_->value.assign(static_cast<std::size_t>(impl_->numel()), fill);
    impl_->requires_grad = requires_grad;
  }

  Tensor(std::vector<int> shape, std::vector<double> data,
         bool requires_grad = false)
      : impl_(std::make_shared<TensorImpl>()) {
    impl_->shape = std::move(shape);
    impl_->value = std::move(data);
    impl_->requires_grad = requires_grad;
    if (impl_->numel() != static_cast<std::int64_t>(impl_->value.size()))
      throw UserError("tensor: data length does not match shape");
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return Tensor({1}, std::vector<double>{v}, requires_grad);
  }

  bool defined() const { return impl_ != nullptr; }
  const std::vector<int>& shape() const { return impl_->shape; }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  int dim(int i) const { return impl_->shape[static_cast<std::size_t>(i)]; }
  std::int64_t numel() const { return impl_->numel(); }

  std::vector<double>& data() { return impl_->value; }
  const std::vector<double>& data() const { return impl_->value; }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool rg) { impl_->requires_grad = rg; }

  void ensure_grad() { impl_->ensure_grad(); }
  bool has_grad() const { return !impl_->grad.empty(); }
  std::vector<double>& grad() { return impl_->grad; }
  const std::vector<double>& grad() const { return impl_->grad; }
  void zero_grad() {
    if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
  }

  // Scalar accessor; throws unless numel == 1.
  double value() const {
    if (numel() != 1) throw UserError("tensor: value() on non-scalar");
    return impl_->value[0];
  }

  bool is_scalar() const { return defined() && numel() == 1; }

  std::shared_ptr<TensorImpl> impl() const { return impl_; }

  Tensor clone() const {
    Tensor t;
    t.impl_ = std::make_shared<TensorImpl>(*impl_);
    return t;
  }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < impl_->shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(impl_->shape[i]);
    }
    return s + ")";
  }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

inline bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape();
}

}  // namespace ppgecg::ad
