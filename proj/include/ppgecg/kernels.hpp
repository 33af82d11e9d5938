#pragma once

#include <cstdint>

// Low-level numeric kernels behind the autodiff ops. Every kernel exists in
// two builds: kernels::serial (plain loops, the reference) and kernels::par
// (OpenMP over independent output rows). Both call the same per-row workers,
// and every parallel loop writes disjoint rows with a fixed accumulation
// order inside each row, so the two backends are bit-identical and results
// do not depend on thread count.
//
// Convolution kernels operate on already padded buffers; padding, cropping
// and transposed-conv bias live in the op layer.
namespace ppgecg::kernels {

struct ConvDims {
  int c_in;
  int c_out;
  int v_in;   // padded input length (conv) / input length (tconv)
  int v_out;  // output length (conv) / full output length (tconv)
  int k;
  int stride;
};

// y[c_out][v_out] = bias + cross-correlation, v_out = (v_in - k)/stride + 1.
void conv_forward(const double* x, const double* w, const double* b, double* y,
                  const ConvDims& d);
void conv_backward_input(const double* gy, const double* w, double* gx,
                         const ConvDims& d);
void conv_backward_kernel(const double* gy, const double* x, double* gw,
                          const ConvDims& d);

// Adjoint of conv_forward. Kernel layout w[c_in][c_out][k];
// v_out = (v_in - 1)*stride + k. No bias (applied after cropping).
void tconv_forward(const double* x, const double* w, double* y,
                   const ConvDims& d);
void tconv_backward_input(const double* gy, const double* w, double* gx,
                          const ConvDims& d);
void tconv_backward_kernel(const double* gy, const double* x, double* gw,
                           const ConvDims& d);

// y[m][n] += a[m][kk] * b[kk][n]
void matmul(const double* a, const double* b, double* y, int m, int kk, int n);
void matmul_backward_a(const double* gy, const double* b, double* ga, int m,
                       int kk, int n);
void matmul_backward_b(const double* gy, const double* a, double* gb, int m,
                       int kk, int n);

// Per-channel standardization over the length axis followed by an affine.
// mu/sig (length c) are outputs of the forward and inputs of the backward.
void layer_norm_forward(const double* x, const double* gain, const double* bias,
                        double* y, double* mu, double* sig, int c, int v,
                        double eps);
void layer_norm_backward(const double* gy, const double* x, const double* gain,
                         const double* mu, const double* sig, double* gx,
                         double* ggain, double* gbias, int c, int v);

// G[i][j] = <A[i,:], B[j,:]> / max(|A[i,:]| |B[j,:]|, guard); guarded entries
// are 0 with zero gradient. na/nb (row norms) are forward outputs reused by
// the backward.
void cosine_rows_forward(const double* a, const double* b, double* g,
                         double* na, double* nb, int c, int v, double guard);
void cosine_rows_backward_a(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* ga, int c, int v, double guard);
void cosine_rows_backward_b(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* gb, int c, int v, double guard);

// Backend switch. Parallel is the default when OpenMP is available.
bool parallel_enabled();
void set_parallel(bool on);
void set_num_threads(int n);  // 0 = runtime default
int max_threads();

namespace serial {
void conv_forward(const double* x, const double* w, const double* b, double* y,
                  const ConvDims& d);
void conv_backward_input(const double* gy, const double* w, double* gx,
                         const ConvDims& d);
void conv_backward_kernel(const double* gy, const double* x, double* gw,
                          const ConvDims& d);
void tconv_forward(const double* x, const double* w, double* y,
                   const ConvDims& d);
void tconv_backward_input(const double* gy, const double* w, double* gx,
                          const ConvDims& d);
void tconv_backward_kernel(const double* gy, const double* x, double* gw,
                           const ConvDims& d);
void matmul(const double* a, const double* b, double* y, int m, int kk, int n);
void matmul_backward_a(const double* gy, const double* b, double* ga, int m,
                       int kk, int n);
void matmul_backward_b(const double* gy, const double* a, double* gb, int m,
                       int kk, int n);
void layer_norm_forward(const double* x, const double* gain, const double* bias,
                        double* y, double* mu, double* sig, int c, int v,
                        double eps);
void layer_norm_backward(const double* gy, const double* x, const double* gain,
                         const double* mu, const double* sig, double* gx,
                         double* ggain, double* gbias, int c, int v);
void cosine_rows_forward(const double* a, const double* b, double* g,
                         double* na, double* nb, int c, int v, double guard);
void cosine_rows_backward_a(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* ga, int c, int v, double guard);
void cosine_rows_backward_b(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* gb, int c, int v, double guard);
}  // namespace serial

namespace par {
void conv_forward(const double* x, const double* w, const double* b, double* y,
                  const ConvDims& d);
void conv_backward_input(const double* gy, const double* w, double* gx,
                         const ConvDims& d);
void conv_backward_kernel(const double* gy, const double* x, double* gw,
                          const ConvDims& d);
void tconv_forward(const double* x, const double* w, double* y,
                   const ConvDims& d);
void tconv_backward_input(const double* gy, const double* w, double* gx,
                          const ConvDims& d);
void tconv_backward_kernel(const double* gy, const double* x, double* gw,
                           const ConvDims& d);
void matmul(const double* a, const double* b, double* y, int m, int kk, int n);
void matmul_backward_a(const double* gy, const double* b, double* ga, int m,
                       int kk, int n);
void matmul_backward_b(const double* gy, const double* a, double* gb, int m,
                       int kk, int n);
void layer_norm_forward(const double* x, const double* gain, const double* bias,
                        double* y, double* mu, double* sig, int c, int v,
                        double eps);
void layer_norm_backward(const double* gy, const double* x, const double* gain,
                         const double* mu, const double* sig, double* gx,
                         double* ggain, double* gbias, int c, int v);
void cosine_rows_forward(const double* a, const double* b, double* g,
                         double* na, double* nb, int c, int v, double guard);
void cosine_rows_backward_a(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* ga, int c, int v, double guard);
void cosine_rows_backward_b(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* gb, int c, int v, double guard);
}  // namespace par

}  // namespace ppgecg::kernels
