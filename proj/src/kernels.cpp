#include "ppgecg/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ppgecg::kernels {

namespace {
#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool on) {
#ifndef _OPENMP
  on = false;
#endif
  g_parallel.store(on, std::memory_order_relaxed);
}

void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

#define PPGECG_DISPATCH(fn, ...)        \
  do {                                  \
    if (parallel_enabled())             \
      par::fn(__VA_ARGS__);             \
    else                                \
      serial::fn(__VA_ARGS__);          \
  } while (0)

void conv_forward(const double* x, const double* w, const double* b, double* y,
                  const ConvDims& d) {
  PPGECG_DISPATCH(conv_forward, x, w, b, y, d);
}
void conv_backward_input(const double* gy, const double* w, double* gx,
                         const ConvDims& d) {
  PPGECG_DISPATCH(conv_backward_input, gy, w, gx, d);
}
void conv_backward_kernel(const double* gy, const double* x, double* gw,
                          const ConvDims& d) {
  PPGECG_DISPATCH(conv_backward_kernel, gy, x, gw, d);
}
void tconv_forward(const double* x, const double* w, double* y,
                   const ConvDims& d) {
  PPGECG_DISPATCH(tconv_forward, x, w, y, d);
}
void tconv_backward_input(const double* gy, const double* w, double* gx,
                          const ConvDims& d) {
  PPGECG_DISPATCH(tconv_backward_input, gy, w, gx, d);
}
void tconv_backward_kernel(const double* gy, const double* x, double* gw,
                           const ConvDims& d) {
  PPGECG_DISPATCH(tconv_backward_kernel, gy, x, gw, d);
}
void matmul(const double* a, const double* b, double* y, int m, int kk, int n) {
  PPGECG_DISPATCH(matmul, a, b, y, m, kk, n);
}
void matmul_backward_a(const double* gy, const double* b, double* ga, int m,
                       int kk, int n) {
  PPGECG_DISPATCH(matmul_backward_a, gy, b, ga, m, kk, n);
}
void matmul_backward_b(const double* gy, const double* a, double* gb, int m,
                       int kk, int n) {
  PPGECG_DISPATCH(matmul_backward_b, gy, a, gb, m, kk, n);
}
void layer_norm_forward(const double* x, const double* gain, const double* bias,
                        double* y, double* mu, double* sig, int c, int v,
                        double eps) {
  PPGECG_DISPATCH(layer_norm_forward, x, gain, bias, y, mu, sig, c, v, eps);
}
void layer_norm_backward(const double* gy, const double* x, const double* gain,
                         const double* mu, const double* sig, double* gx,
                         double* ggain, double* gbias, int c, int v) {
  PPGECG_DISPATCH(layer_norm_backward, gy, x, gain, mu, sig, gx, ggain, gbias,
                  c, v);
}
void cosine_rows_forward(const double* a, const double* b, double* g,
                         double* na, double* nb, int c, int v, double guard) {
  PPGECG_DISPATCH(cosine_rows_forward, a, b, g, na, nb, c, v, guard);
}
void cosine_rows_backward_a(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* ga, int c, int v, double guard) {
  PPGECG_DISPATCH(cosine_rows_backward_a, gg, a, b, g, na, nb, ga, c, v, guard);
}
void cosine_rows_backward_b(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* gb, int c, int v, double guard) {
  PPGECG_DISPATCH(cosine_rows_backward_b, gg, a, b, g, na, nb, gb, c, v, guard);
}

#undef PPGECG_DISPATCH

}  // namespace ppgecg::kernels
