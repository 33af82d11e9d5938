#pragma once

#include <vector>

#include "ppgecg/tape.hpp"
#include "ppgecg/tensor.hpp"

namespace ppgecg::ad {

enum class Padding { kValid, kSame };

// All ops use cross-correlation semantics and record onto the active tape
// when any input requires gradients. Shapes are explicit; the only implied
// broadcast is the per-channel bias add.

// x: [C_in, V], k: [C_out, C_in, K], b: [C_out] (optional, pass {}).
// Same-padding splits K-1 zeros as floor((K-1)/2) left, the rest right.
Tensor conv1d(const Tensor& x, const Tensor& k, const Tensor& b, int stride,
              Padding pad);

// Adjoint of conv1d. x: [C_in, V], k: [C_in, C_out, K], b: [C_out].
// Valid: V' = (V-1)*stride + K. Same requires stride 1 and yields V' = V.
Tensor tconv1d(const Tensor& x, const Tensor& k, const Tensor& b, int stride,
               Padding pad);

// Per-channel standardization over the length axis, then per-channel affine.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

// W: [n_out, n_in], x: [n_in], b: [n_out].
Tensor linear(const Tensor& w, const Tensor& x, const Tensor& b);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Row-wise softmax; a rank-1 tensor is one row.
Tensor softmax_rows(const Tensor& x);

// [Ca, V] ++ [Cb, V] -> [Ca+Cb, V], a's channels first.
Tensor concat_channels(const Tensor& a, const Tensor& b);

// [C, V] -> [4C]: (mean, variance, max, min) per channel, channel-major.
Tensor channel_stats(const Tensor& x);

// [m, k] x [k, n] -> [m, n]
Tensor matmul(const Tensor& a, const Tensor& b);

// G[i,j] = cosine(A[i,:], B[j,:]); zero-norm rows give 0 with zero gradient.
Tensor cosine_rows(const Tensor& a, const Tensor& b, double guard = 1e-12);

// y[c,:] = x[c,:] * w[c]
Tensor scale_rows(const Tensor& x, const Tensor& w);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double c);
Tensor sum(const Tensor& x);
// sum of squared differences (squared L2 error)
Tensor sse(const Tensor& a, const Tensor& b);

// Sum of row L2 norms plus column L2 norms of a [C, V] map.
Tensor group_sparsity(const Tensor& x);

// -sum(l * log(max(p, clamp))) for a probability vector and one-hot label.
Tensor cross_entropy(const Tensor& probs, const Tensor& onehot,
                     double clamp = 1e-12);

Tensor pick(const Tensor& x, int index);
Tensor reshape(const Tensor& x, std::vector<int> shape);

}  // namespace ppgecg::ad
