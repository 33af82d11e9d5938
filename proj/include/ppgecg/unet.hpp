#pragma once

#include "ppgecg/model.hpp"

namespace ppgecg::net {

// One-dimensional U-Net baseline: three conv encoder layers, two transposed
// decoder layers and the generation layer, with mirrored layers joined by
// element-wise summation. ECG inference only.
struct UnetModel {
  int length = 268;
  ConvLayer enc1, enc2, enc3;
  ConvLayer dec1, dec2;
  ConvLayer gen;
  std::uint64_t init_seed = 0;

  static UnetModel init(int length, std::uint64_t seed);
  ad::Tensor forward(const ad::Tensor& input) const;
  std::vector<std::pair<std::string, ad::Tensor>> named_params() const;
  std::int64_t param_count() const;
};

}  // namespace ppgecg::net
