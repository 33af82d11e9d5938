#include "kernels_detail.hpp"

// OpenMP backend. Schedules are static so thread assignment is reproducible;
// correctness does not depend on it since rows are independent.
namespace ppgecg::kernels::par {

using namespace ppgecg::kernels::detail;

void conv_forward(const double* x, const double* w, const double* b, double* y,
                  const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.c_out; ++co) conv_forward_row(co, x, w, b, y, d);
}

void conv_backward_input(const double* gy, const double* w, double* gx,
                         const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < d.c_in; ++ci) conv_backward_input_row(ci, gy, w, gx, d);
}

void conv_backward_kernel(const double* gy, const double* x, double* gw,
                          const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.c_out; ++co)
    conv_backward_kernel_row(co, gy, x, gw, d);
}

void tconv_forward(const double* x, const double* w, double* y,
                   const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.c_out; ++co) tconv_forward_row(co, x, w, y, d);
}

void tconv_backward_input(const double* gy, const double* w, double* gx,
                          const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < d.c_in; ++ci)
    tconv_backward_input_row(ci, gy, w, gx, d);
}

void tconv_backward_kernel(const double* gy, const double* x, double* gw,
                           const ConvDims& d) {
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < d.c_in; ++ci)
    tconv_backward_kernel_row(ci, gy, x, gw, d);
}

void matmul(const double* a, const double* b, double* y, int m, int kk, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) matmul_row(i, a, b, y, kk, n);
}

void matmul_backward_a(const double* gy, const double* b, double* ga, int m,
                       int kk, int n) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) matmul_backward_a_row(i, gy, b, ga, kk, n);
}

void matmul_backward_b(const double* gy, const double* a, double* gb, int m,
                       int kk, int n) {
#pragma omp parallel for schedule(static)
  for (int k = 0; k < kk; ++k) matmul_backward_b_row(k, gy, a, gb, m, kk, n);
}

void layer_norm_forward(const double* x, const double* gain, const double* bias,
                        double* y, double* mu, double* sig, int c, int v,
                        double eps) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c; ++i)
    layer_norm_forward_row(i, x, gain, bias, y, mu, sig, v, eps);
}

void layer_norm_backward(const double* gy, const double* x, const double* gain,
                         const double* mu, const double* sig, double* gx,
                         double* ggain, double* gbias, int c, int v) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c; ++i)
    layer_norm_backward_row(i, gy, x, gain, mu, sig, gx, ggain, gbias, v);
}

void cosine_rows_forward(const double* a, const double* b, double* g,
                         double* na, double* nb, int c, int v, double guard) {
  row_norms(a, na, c, v);
  row_norms(b, nb, c, v);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c; ++i) cosine_forward_row(i, a, b, g, na, nb, c, v, guard);
}

void cosine_rows_backward_a(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* ga, int c, int v, double guard) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < c; ++i)
    cosine_backward_a_row(i, gg, a, b, g, na, nb, ga, c, v, guard);
}

void cosine_rows_backward_b(const double* gg, const double* a, const double* b,
                            const double* g, const double* na, const double* nb,
                            double* gb, int c, int v, double guard) {
#pragma omp parallel for schedule(static)
  for (int j = 0; j < c; ++j)
    cosine_backward_b_row(j, gg, a, b, g, na, nb, gb, c, v, guard);
}

}  // namespace ppgecg::kernels::par
