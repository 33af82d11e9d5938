#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppgecg/ops.hpp"

namespace ppgecg::net {

struct ConvSpec {
  int n_in = 0;
  int n_out = 0;
  int k = 0;
  int stride = 1;
};

// Geometry of the multi-task network. The defaults build the published
// architecture; `tiny` is a scaled-down variant with identical operators for
// fast finite-difference checks; `compressed()` derives the pruned/recursive
// variant by halving every channel-indexed width.
struct NetConfig {
  int length = 268;
  int n_classes = 5;
  bool has_diagnosis = true;
  bool recursive = false;  // one shared FEM/FTM applied `recursion` times
  int recursion = 1;

  ConvSpec first_conv{1, 60, 30, 1};
  std::vector<std::array<ConvSpec, 2>> fems;
  std::vector<std::array<ConvSpec, 2>> ftms;
  int gen_kernel = 30;
  int attn_hidden = 20;
  std::array<ConvSpec, 3> cls{};
  int cls_fc_hidden = 10;

  int channels() const { return first_conv.n_out; }
  int stats_dim() const { return 4 * channels(); }
  // Classifier conv output lengths (valid padding).
  std::vector<int> cls_lengths() const;
  int cls_fc_in() const { return cls_lengths().back(); }

  void validate() const;

  static NetConfig paper_full(int n_classes = 5);
  static NetConfig tiny(int length = 32, int n_classes = 5);
  NetConfig compressed() const;
  // Same encoder/decoder without the diagnosis branch (ECG-to-PPG mapping).
  NetConfig without_diagnosis() const;
};

struct ConvLayer {
  ad::Tensor w;  // conv: [out, in, k]; transposed: [in, out, k]
  ad::Tensor b;
  ad::Tensor ln_g, ln_b;  // defined iff normalized
  ConvSpec spec;
  bool transposed = false;
  bool normalized = true;
  bool activated = true;  // ReLU after the norm
  ad::Padding pad = ad::Padding::kSame;
};

struct DenseLayer {
  ad::Tensor w;  // [out, in]
  ad::Tensor b;
};

struct ModelParams {
  NetConfig cfg;
  ConvLayer first_conv;
  std::vector<std::array<ConvLayer, 2>> fems;  // size 1 when recursive
  std::vector<std::array<ConvLayer, 2>> ftms;
  ad::Tensor theta;  // [C, C]
  ConvLayer gen;     // transposed, no norm, no activation
  DenseLayer attn1, attn2;
  ConvLayer cls1, cls2, cls3;
  DenseLayer fc1, fc2;
  // Original channel indices kept by pruning (empty for full models).
  std::vector<int> kept_conv, kept_gen;
  std::uint64_t init_seed = 0;

  static ModelParams init(const NetConfig& cfg, std::uint64_t seed);

  // Stable order: the optimizer, checkpoints and the census all iterate this.
  std::vector<std::pair<std::string, ad::Tensor>> named_params() const;
  std::int64_t param_count() const;
  std::vector<std::pair<std::string, std::int64_t>> census() const;
  void set_requires_grad(bool rg) const;
  void zero_grads() const;
  ModelParams clone() const;
};

struct ForwardOutputs {
  ad::Tensor ecg_hat;      // [L]
  ad::Tensor class_probs;  // [n_classes]; undefined without diagnosis branch
  ad::Tensor f1;           // [C, L] first-conv feature map
  ad::Tensor fstar;        // [C, L] fused map
  ad::Tensor weights;      // [C]; undefined without diagnosis branch
  ad::Tensor alpha;        // [C, C] fusion attention
};

// conv/tconv -> layer norm -> ReLU, as configured on the layer.
ad::Tensor conv_block(const ConvLayer& layer, const ad::Tensor& x,
                      double ln_eps = 1e-5);

// Two-scale module: concat(C1(x), C2(C1(x))) along channels.
ad::Tensor fem_forward(const ad::Tensor& x, const std::array<ConvLayer, 2>& m);
ad::Tensor ftm_forward(const ad::Tensor& x, const std::array<ConvLayer, 2>& m);

// Attention-gated fusion: G = cos(F1, FT) row-wise, alpha = softmax(G Theta),
// F*[i,:] = FT[i,:] + sum_j alpha[i,j] F1[j,:].
std::pair<ad::Tensor, ad::Tensor> fusion_attention(const ad::Tensor& f1,
                                                   const ad::Tensor& ft,
                                                   const ad::Tensor& theta);

ad::Tensor generate_ecg(const ad::Tensor& fstar, const ConvLayer& gen);

// Returns (class probabilities, channel weights).
std::pair<ad::Tensor, ad::Tensor> diagnose(const ad::Tensor& fstar,
                                           const ModelParams& m);

ForwardOutputs forward_full(const ModelParams& m, const ad::Tensor& input);
ForwardOutputs forward_full(const ModelParams& m,
                            const std::vector<double>& input);

}  // namespace ppgecg::net
