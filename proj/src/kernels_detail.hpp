#pragma once

#include <cmath>

#include "ppgecg/kernels.hpp"

// Per-row workers shared by the serial and OpenMP backends. Each worker
// touches exactly one output row, so any schedule over rows is race-free and
// bit-identical to the serial loop.
//
// The stride-1 paths unroll four kernel taps per sweep (axpy form) and use
// four running accumulators for dot products; the combination order is fixed,
// so results are reproducible run to run.
namespace ppgecg::kernels::detail {

inline double dot4(const double* a, const double* b, int n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  int v = 0;
  for (; v + 4 <= n; v += 4) {
    a0 += a[v] * b[v];
    a1 += a[v + 1] * b[v + 1];
    a2 += a[v + 2] * b[v + 2];
    a3 += a[v + 3] * b[v + 3];
  }
  double acc = (a0 + a1) + (a2 + a3);
  for (; v < n; ++v) acc += a[v] * b[v];
  return acc;
}

inline void conv_forward_row(int co, const double* x, const double* w,
                             const double* b, double* y, const ConvDims& d) {
  double* yr = y + static_cast<std::size_t>(co) * d.v_out;
  const double bias = b ? b[co] : 0.0;
  for (int v = 0; v < d.v_out; ++v) yr[v] = bias;
  for (int ci = 0; ci < d.c_in; ++ci) {
    const double* xr = x + static_cast<std::size_t>(ci) * d.v_in;
    const double* wr = w + (static_cast<std::size_t>(co) * d.c_in + ci) * d.k;
    if (d.stride == 1) {
      int t = 0;
      for (; t + 4 <= d.k; t += 4) {
        const double w0 = wr[t], w1 = wr[t + 1], w2 = wr[t + 2], w3 = wr[t + 3];
        const double* xs = xr + t;
        for (int v = 0; v < d.v_out; ++v)
          yr[v] += w0 * xs[v] + w1 * xs[v + 1] + w2 * xs[v + 2] + w3 * xs[v + 3];
      }
      for (; t < d.k; ++t) {
        const double wv = wr[t];
        const double* xs = xr + t;
        for (int v = 0; v < d.v_out; ++v) yr[v] += wv * xs[v];
      }
    } else {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        for (int v = 0; v < d.v_out; ++v) yr[v] += wv * xr[v * d.stride + t];
      }
    }
  }
}

inline void conv_backward_input_row(int ci, const double* gy, const double* w,
                                    double* gx, const ConvDims& d) {
  double* gxr = gx + static_cast<std::size_t>(ci) * d.v_in;
  for (int co = 0; co < d.c_out; ++co) {
    const double* gyr = gy + static_cast<std::size_t>(co) * d.v_out;
    const double* wr = w + (static_cast<std::size_t>(co) * d.c_in + ci) * d.k;
    if (d.stride == 1) {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        double* gxs = gxr + t;
        for (int v = 0; v < d.v_out; ++v) gxs[v] += wv * gyr[v];
      }
    } else {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        for (int v = 0; v < d.v_out; ++v) gxr[v * d.stride + t] += wv * gyr[v];
      }
    }
  }
}

inline void conv_backward_kernel_row(int co, const double* gy, const double* x,
                                     double* gw, const ConvDims& d) {
  const double* gyr = gy + static_cast<std::size_t>(co) * d.v_out;
  for (int ci = 0; ci < d.c_in; ++ci) {
    const double* xr = x + static_cast<std::size_t>(ci) * d.v_in;
    double* gwr = gw + (static_cast<std::size_t>(co) * d.c_in + ci) * d.k;
    for (int t = 0; t < d.k; ++t) {
      if (d.stride == 1) {
        gwr[t] += dot4(gyr, xr + t, d.v_out);
      } else {
        double acc = 0.0;
        for (int v = 0; v < d.v_out; ++v) acc += gyr[v] * xr[v * d.stride + t];
        gwr[t] += acc;
      }
    }
  }
}

inline void tconv_forward_row(int co, const double* x, const double* w,
                              double* y, const ConvDims& d) {
  double* yr = y + static_cast<std::size_t>(co) * d.v_out;
  for (int v = 0; v < d.v_out; ++v) yr[v] = 0.0;
  for (int ci = 0; ci < d.c_in; ++ci) {
    const double* xr = x + static_cast<std::size_t>(ci) * d.v_in;
    const double* wr = w + (static_cast<std::size_t>(ci) * d.c_out + co) * d.k;
    if (d.stride == 1) {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        double* ys = yr + t;
        for (int v = 0; v < d.v_in; ++v) ys[v] += wv * xr[v];
      }
    } else {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        for (int v = 0; v < d.v_in; ++v) yr[v * d.stride + t] += wv * xr[v];
      }
    }
  }
}

inline void tconv_backward_input_row(int ci, const double* gy, const double* w,
                                     double* gx, const ConvDims& d) {
  double* gxr = gx + static_cast<std::size_t>(ci) * d.v_in;
  for (int co = 0; co < d.c_out; ++co) {
    const double* gyr = gy + static_cast<std::size_t>(co) * d.v_out;
    const double* wr = w + (static_cast<std::size_t>(ci) * d.c_out + co) * d.k;
    if (d.stride == 1) {
      int t = 0;
      for (; t + 4 <= d.k; t += 4) {
        const double w0 = wr[t], w1 = wr[t + 1], w2 = wr[t + 2], w3 = wr[t + 3];
        const double* gys = gyr + t;
        for (int v = 0; v < d.v_in; ++v)
          gxr[v] +=
              w0 * gys[v] + w1 * gys[v + 1] + w2 * gys[v + 2] + w3 * gys[v + 3];
      }
      for (; t < d.k; ++t) {
        const double wv = wr[t];
        const double* gys = gyr + t;
        for (int v = 0; v < d.v_in; ++v) gxr[v] += wv * gys[v];
      }
    } else {
      for (int t = 0; t < d.k; ++t) {
        const double wv = wr[t];
        for (int v = 0; v < d.v_in; ++v) gxr[v] += wv * gyr[v * d.stride + t];
      }
    }
  }
}

inline void tconv_backward_kernel_row(int ci, const double* gy, const double* x,
                                      double* gw, const ConvDims& d) {
  const double* xr = x + static_cast<std::size_t>(ci) * d.v_in;
  for (int co = 0; co < d.c_out; ++co) {
    const double* gyr = gy + static_cast<std::size_t>(co) * d.v_out;
    double* gwr = gw + (static_cast<std::size_t>(ci) * d.c_out + co) * d.k;
    for (int t = 0; t < d.k; ++t) {
      if (d.stride == 1) {
        gwr[t] += dot4(xr, gyr + t, d.v_in);
      } else {
        double acc = 0.0;
        for (int v = 0; v < d.v_in; ++v) acc += xr[v] * gyr[v * d.stride + t];
        gwr[t] += acc;
      }
    }
  }
}

inline void matmul_row(int i, const double* a, const double* b, double* y,
                       int kk, int n) {
  const double* ar = a + static_cast<std::size_t>(i) * kk;
  double* yr = y + static_cast<std::size_t>(i) * n;
  for (int k = 0; k < kk; ++k) {
    const double av = ar[k];
    const double* br = b + static_cast<std::size_t>(k) * n;
    for (int j = 0; j < n; ++j) yr[j] += av * br[j];
  }
}

inline void matmul_backward_a_row(int i, const double* gy, const double* b,
                                  double* ga, int kk, int n) {
  const double* gyr = gy + static_cast<std::size_t>(i) * n;
  double* gar = ga + static_cast<std::size_t>(i) * kk;
  for (int k = 0; k < kk; ++k)
    gar[k] += dot4(gyr, b + static_cast<std::size_t>(k) * n, n);
}

inline void matmul_backward_b_row(int k, const double* gy, const double* a,
                                  double* gb, int m, int kk, int n) {
  double* gbr = gb + static_cast<std::size_t>(k) * n;
  for (int i = 0; i < m; ++i) {
    const double aik = a[static_cast<std::size_t>(i) * kk + k];
    const double* gyr = gy + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) gbr[j] += aik * gyr[j];
  }
}

inline void layer_norm_forward_row(int c, const double* x, const double* gain,
                                   const double* bias, double* y, double* mu,
                                   double* sig, int v, double eps) {
  const double* xr = x + static_cast<std::size_t>(c) * v;
  double* yr = y + static_cast<std::size_t>(c) * v;
  double m = 0.0;
  for (int i = 0; i < v; ++i) m += xr[i];
  m /= v;
  double var = 0.0;
  for (int i = 0; i < v; ++i) {
    const double dx = xr[i] - m;
    var += dx * dx;
  }
  var /= v;
  const double s = std::sqrt(var + eps);
  mu[c] = m;
  sig[c] = s;
  const double g = gain[c], b = bias[c], inv = 1.0 / s;
  for (int i = 0; i < v; ++i) yr[i] = g * (xr[i] - m) * inv + b;
}

inline void layer_norm_backward_row(int c, const double* gy, const double* x,
                                    const double* gain, const double* mu,
                                    const double* sig, double* gx,
                                    double* ggain, double* gbias, int v) {
  const double* xr = x + static_cast<std::size_t>(c) * v;
  const double* gyr = gy + static_cast<std::size_t>(c) * v;
  double* gxr = gx ? gx + static_cast<std::size_t>(c) * v : nullptr;
  const double m = mu[c], s = sig[c], inv = 1.0 / s;
  double sum_gy = 0.0, sum_gy_xhat = 0.0;
  for (int i = 0; i < v; ++i) {
    const double xhat = (xr[i] - m) * inv;
    sum_gy += gyr[i];
    sum_gy_xhat += gyr[i] * xhat;
  }
  if (ggain) ggain[c] += sum_gy_xhat;
  if (gbias) gbias[c] += sum_gy;
  if (gxr) {
    const double g = gain[c];
    const double a = sum_gy / v, bterm = sum_gy_xhat / v;
    for (int i = 0; i < v; ++i) {
      const double xhat = (xr[i] - m) * inv;
      gxr[i] += g * inv * (gyr[i] - a - xhat * bterm);
    }
  }
}

inline void cosine_forward_row(int i, const double* a, const double* b,
                               double* g, const double* na, const double* nb,
                               int c, int v, double guard) {
  const double* ar = a + static_cast<std::size_t>(i) * v;
  double* gr = g + static_cast<std::size_t>(i) * c;
  for (int j = 0; j < c; ++j) {
    const double den = na[i] * nb[j];
    gr[j] = den > guard
                ? dot4(ar, b + static_cast<std::size_t>(j) * v, v) / den
                : 0.0;
  }
}

inline void cosine_backward_a_row(int i, const double* gg, const double* a,
                                  const double* b, const double* g,
                                  const double* na, const double* nb,
                                  double* ga, int c, int v, double guard) {
  const double* ar = a + static_cast<std::size_t>(i) * v;
  double* gar = ga + static_cast<std::size_t>(i) * v;
  const double nai = na[i];
  for (int j = 0; j < c; ++j) {
    const double den = nai * nb[j];
    if (den <= guard) continue;
    const double gij = gg[static_cast<std::size_t>(i) * c + j];
    if (gij == 0.0) continue;
    const double* br = b + static_cast<std::size_t>(j) * v;
    const double cb = gij / den;
    const double ca = -gij * g[static_cast<std::size_t>(i) * c + j] / (nai * nai);
    for (int t = 0; t < v; ++t) gar[t] += cb * br[t] + ca * ar[t];
  }
}

inline void cosine_backward_b_row(int j, const double* gg, const double* a,
                                  const double* b, const double* g,
                                  const double* na, const double* nb,
                                  double* gb, int c, int v, double guard) {
  const double* br = b + static_cast<std::size_t>(j) * v;
  double* gbr = gb + static_cast<std::size_t>(j) * v;
  const double nbj = nb[j];
  for (int i = 0; i < c; ++i) {
    const double den = na[i] * nbj;
    if (den <= guard) continue;
    const double gij = gg[static_cast<std::size_t>(i) * c + j];
    if (gij == 0.0) continue;
    const double* ar = a + static_cast<std::size_t>(i) * v;
    const double ca = gij / den;
    const double cb = -gij * g[static_cast<std::size_t>(i) * c + j] / (nbj * nbj);
    for (int t = 0; t < v; ++t) gbr[t] += ca * ar[t] + cb * br[t];
  }
}

inline void row_norms(const double* a, double* out, int c, int v) {
  for (int i = 0; i < c; ++i)
    out[i] = std::sqrt(dot4(a + static_cast<std::size_t>(i) * v,
                            a + static_cast<std::size_t>(i) * v, v));
}

}  // namespace ppgecg::kernels::detail
