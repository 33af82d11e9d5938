#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ppgecg/tensor.hpp"

namespace ppgecg::ad {

// Reverse-mode tape. Constructing a Tape makes it the active tape for the
// current thread (tapes nest); ops record themselves while one is active and
// any input requires gradients.
//
// backward() re-walks the whole recording: gradients of recorded op outputs
// are zeroed first, the seed is injected, and entries run in reverse order,
// so each node is visited exactly once per call and leaf gradients (inputs
// and parameters) accumulate across repeated calls.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* current();

  void record(std::shared_ptr<TensorImpl> out, std::function<void()> backfn);

  // Seeds d(loss)/d(loss) = 1. Requires a scalar recorded on this tape.
  void backward(const Tensor& loss);

  // General vector-Jacobian product: seeds d(out) with `seed`.
  void backward_seed(const Tensor& out, const std::vector<double>& seed);

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::shared_ptr<TensorImpl> out;
    std::function<void()> backfn;
  };
  std::vector<Entry> entries_;
  Tape* prev_ = nullptr;
};

}  // namespace ppgecg::ad
