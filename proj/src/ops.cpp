#include "ppgecg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "ppgecg/kernels.hpp"

namespace ppgecg::ad {

namespace {

bool should_record(std::initializer_list<const Tensor*> ins) {
  if (!Tape::current()) return false;
  for (const Tensor* t : ins)
    if (t->defined() && t->requires_grad()) return true;
  return false;
}

void check(bool cond, const char* msg) {
  if (!cond) throw UserError(msg);
}

int pad_left_of(int k) { return (k - 1) / 2; }

}  // namespace

Tensor conv1d(const Tensor& x, const Tensor& k, const Tensor& b, int stride,
              Padding pad) {
  check(x.rank() == 2, "conv1d: input must be [C_in, V]");
  check(k.rank() == 3, "conv1d: kernel must be [C_out, C_in, K]");
  check(stride >= 1, "conv1d: stride must be >= 1");
  const int c_in = x.dim(0), v = x.dim(1);
  const int c_out = k.dim(0), kk = k.dim(2);
  check(k.dim(1) == c_in, "conv1d: kernel C_in mismatch");
  if (b.defined()) check(b.rank() == 1 && b.dim(0) == c_out, "conv1d: bias shape");

  const int pl = pad == Padding::kSame ? pad_left_of(kk) : 0;
  const int vp = pad == Padding::kSame ? v + kk - 1 : v;
  check(kk <= vp, "conv1d: kernel longer than padded input");
  const int v_out = (vp - kk) / stride + 1;

  auto xp = std::make_shared<std::vector<double>>(
      static_cast<std::size_t>(c_in) * vp, 0.0);
  for (int c = 0; c < c_in; ++c)
    std::copy(x.data().begin() + static_cast<std::ptrdiff_t>(c) * v,
              x.data().begin() + static_cast<std::ptrdiff_t>(c + 1) * v,
              xp->begin() + static_cast<std::ptrdiff_t>(c) * vp + pl);

  const bool rec = should_record({&x, &k, &b});
  Tensor y({c_out, v_out}, 0.0, rec);
  kernels::ConvDims d{c_in, c_out, vp, v_out, kk, stride};
  kernels::conv_forward(xp->data(), k.data().data(),
                        b.defined() ? b.data().data() : nullptr,
                        y.data().data(), d);

  if (rec) {
    auto xi = x.impl(), ki = k.impl(), yi = y.impl();
    auto bi = b.defined() ? b.impl() : nullptr;
    Tape::current()->record(yi, [xi, ki, bi, yi, xp, d, pl, v]() {
      const double* gy = yi->grad.data();
      if (xi->requires_grad) {
        std::vector<double> gxp(static_cast<std::size_t>(d.c_in) * d.v_in, 0.0);
        kernels::conv_backward_input(gy, ki->value.data(), gxp.data(), d);
        xi->ensure_grad();
        for (int c = 0; c < d.c_in; ++c)
          for (int i = 0; i < v; ++i)
            xi->grad[static_cast<std::size_t>(c) * v + i] +=
                gxp[static_cast<std::size_t>(c) * d.v_in + pl + i];
      }
      if (ki->requires_grad) {
        ki->ensure_grad();
        kernels::conv_backward_kernel(gy, xp->data(), ki->grad.data(), d);
      }
      if (bi && bi->requires_grad) {
        bi->ensure_grad();
        for (int co = 0; co < d.c_out; ++co) {
          double acc = 0.0;
          for (int i = 0; i < d.v_out; ++i)
            acc += gy[static_cast<std::size_t>(co) * d.v_out + i];
          bi->grad[co] += acc;
        }
      }
    });
  }
  return y;
}

Tensor tconv1d(const Tensor& x, const Tensor& k, const Tensor& b, int stride,
               Padding pad) {
  check(x.rank() == 2, "tconv1d: input must be [C_in, V]");
  check(k.rank() == 3, "tconv1d: kernel must be [C_in, C_out, K]");
  check(stride >= 1, "tconv1d: stride must be >= 1");
  const int c_in = x.dim(0), v = x.dim(1);
  const int c_out = k.dim(1), kk = k.dim(2);
  check(k.dim(0) == c_in, "tconv1d: kernel C_in mismatch");
  if (b.defined())
    check(b.rank() == 1 && b.dim(0) == c_out, "tconv1d: bias shape");
  if (pad == Padding::kSame)
    check(stride == 1, "tconv1d: same padding requires stride 1");

  const int v_full = (v - 1) * stride + kk;
  const int pl = pad == Padding::kSame ? pad_left_of(kk) : 0;
  const int v_out = pad == Padding::kSame ? v : v_full;

  const bool rec = should_record({&x, &k, &b});
  kernels::ConvDims d{c_in, c_out, v, v_full, kk, stride};
  std::vector<double> yfull(static_cast<std::size_t>(c_out) * v_full, 0.0);
  kernels::tconv_forward(x.data().data(), k.data().data(), yfull.data(), d);

  Tensor y({c_out, v_out}, 0.0, rec);
  for (int co = 0; co < c_out; ++co) {
    const double bias = b.defined() ? b.data()[co] : 0.0;
    for (int i = 0; i < v_out; ++i)
      y.data()[static_cast<std::size_t>(co) * v_out + i] =
          yfull[static_cast<std::size_t>(co) * v_full + pl + i] + bias;
  }

  if (rec) {
    auto xi = x.impl(), ki = k.impl(), yi = y.impl();
    auto bi = b.defined() ? b.impl() : nullptr;
    Tape::current()->record(yi, [xi, ki, bi, yi, d, pl, v_out, v_full]() {
      // Embed the cropped gradient back into full coordinates.
      std::vector<double> gyfull(static_cast<std::size_t>(d.c_out) * v_full,
                                 0.0);
      for (int co = 0; co < d.c_out; ++co)
        for (int i = 0; i < v_out; ++i)
          gyfull[static_cast<std::size_t>(co) * v_full + pl + i] =
              yi->grad[static_cast<std::size_t>(co) * v_out + i];
      if (xi->requires_grad) {
        xi->ensure_grad();
        kernels::tconv_backward_input(gyfull.data(), ki->value.data(),
                                      xi->grad.data(), d);
      }
      if (ki->requires_grad) {
        ki->ensure_grad();
        kernels::tconv_backward_kernel(gyfull.data(), xi->value.data(),
                                       ki->grad.data(), d);
      }
      if (bi && bi->requires_grad) {
        bi->ensure_grad();
        for (int co = 0; co < d.c_out; ++co) {
          double acc = 0.0;
          for (int i = 0; i < v_out; ++i)
            acc += yi->grad[static_cast<std::size_t>(co) * v_out + i];
          bi->grad[co] += acc;
        }
      }
    });
  }
  return y;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
  check(x.rank() == 2, "layer_norm: input must be [C, V]");
  const int c = x.dim(0), v = x.dim(1);
  check(gain.rank() == 1 && gain.dim(0) == c, "layer_norm: gain shape");
  check(bias.rank() == 1 && bias.dim(0) == c, "layer_norm: bias shape");
  check(eps > 0, "layer_norm: eps must be positive");

  const bool rec = should_record({&x, &gain, &bias});
  Tensor y({c, v}, 0.0, rec);
  auto mu = std::make_shared<std::vector<double>>(c);
  auto sig = std::make_shared<std::vector<double>>(c);
  kernels::layer_norm_forward(x.data().data(), gain.data().data(),
                              bias.data().data(), y.data().data(), mu->data(),
                              sig->data(), c, v, eps);
  if (rec) {
    auto xi = x.impl(), gi = gain.impl(), bi = bias.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, gi, bi, yi, mu, sig, c, v]() {
      if (xi->requires_grad) xi->ensure_grad();
      if (gi->requires_grad) gi->ensure_grad();
      if (bi->requires_grad) bi->ensure_grad();
      kernels::layer_norm_backward(
          yi->grad.data(), xi->value.data(), gi->value.data(), mu->data(),
          sig->data(), xi->requires_grad ? xi->grad.data() : nullptr,
          gi->requires_grad ? gi->grad.data() : nullptr,
          bi->requires_grad ? bi->grad.data() : nullptr, c, v);
    });
  }
  return y;
}

Tensor linear(const Tensor& w, const Tensor& x, const Tensor& b) {
  check(w.rank() == 2, "linear: weight must be [n_out, n_in]");
  check(x.rank() == 1, "linear: input must be a vector");
  const int n_out = w.dim(0), n_in = w.dim(1);
  check(x.dim(0) == n_in, "linear: input length mismatch");
  if (b.defined()) check(b.rank() == 1 && b.dim(0) == n_out, "linear: bias shape");

  const bool rec = should_record({&w, &x, &b});
  Tensor y({n_out}, 0.0, rec);
  for (int o = 0; o < n_out; ++o) {
    double acc = b.defined() ? b.data()[o] : 0.0;
    const double* wr = w.data().data() + static_cast<std::size_t>(o) * n_in;
    for (int i = 0; i < n_in; ++i) acc += wr[i] * x.data()[i];
    y.data()[o] = acc;
  }
  if (rec) {
    auto wi = w.impl(), xi = x.impl(), yi = y.impl();
    auto bi = b.defined() ? b.impl() : nullptr;
    Tape::current()->record(yi, [wi, xi, bi, yi, n_out, n_in]() {
      const auto& gy = yi->grad;
      if (wi->requires_grad) {
        wi->ensure_grad();
        for (int o = 0; o < n_out; ++o)
          for (int i = 0; i < n_in; ++i)
            wi->grad[static_cast<std::size_t>(o) * n_in + i] +=
                gy[o] * xi->value[i];
      }
      if (xi->requires_grad) {
        xi->ensure_grad();
        for (int i = 0; i < n_in; ++i) {
          double acc = 0.0;
          for (int o = 0; o < n_out; ++o)
            acc += wi->value[static_cast<std::size_t>(o) * n_in + i] * gy[o];
          xi->grad[i] += acc;
        }
      }
      if (bi && bi->requires_grad) {
        bi->ensure_grad();
        for (int o = 0; o < n_out; ++o) bi->grad[o] += gy[o];
      }
    });
  }
  return y;
}

Tensor relu(const Tensor& x) {
  const bool rec = should_record({&x});
  Tensor y(x.shape(), 0.0, rec);
  const std::size_t n = x.data().size();
  for (std::size_t i = 0; i < n; ++i) y.data()[i] = std::max(x.data()[i], 0.0);
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, n]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        if (xi->value[i] > 0.0) xi->grad[i] += yi->grad[i];
    });
  }
  return y;
}

Tensor sigmoid(const Tensor& x) {
  const bool rec = should_record({&x});
  Tensor y(x.shape(), 0.0, rec);
  const std::size_t n = x.data().size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x.data()[i];
    if (v >= 0) {
      y.data()[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      y.data()[i] = e / (1.0 + e);
    }
  }
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, n]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double s = yi->value[i];
        xi->grad[i] += yi->grad[i] * s * (1.0 - s);
      }
    });
  }
  return y;
}

Tensor softmax_rows(const Tensor& x) {
  check(x.rank() == 1 || x.rank() == 2, "softmax_rows: rank must be 1 or 2");
  const int rows = x.rank() == 2 ? x.dim(0) : 1;
  const int cols = x.rank() == 2 ? x.dim(1) : x.dim(0);
  const bool rec = should_record({&x});
  Tensor y(x.shape(), 0.0, rec);
  for (int r = 0; r < rows; ++r) {
    const double* xr = x.data().data() + static_cast<std::size_t>(r) * cols;
    double* yr = y.data().data() + static_cast<std::size_t>(r) * cols;
    double m = xr[0];
    for (int j = 1; j < cols; ++j) m = std::max(m, xr[j]);
    double z = 0.0;
    for (int j = 0; j < cols; ++j) {
      yr[j] = std::exp(xr[j] - m);
      z += yr[j];
    }
    for (int j = 0; j < cols; ++j) yr[j] /= z;
  }
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, rows, cols]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        const double* yr = yi->value.data() + static_cast<std::size_t>(r) * cols;
        const double* gr = yi->grad.data() + static_cast<std::size_t>(r) * cols;
        double dot = 0.0;
        for (int j = 0; j < cols; ++j) dot += gr[j] * yr[j];
        double* gx = xi->grad.data() + static_cast<std::size_t>(r) * cols;
        for (int j = 0; j < cols; ++j) gx[j] += yr[j] * (gr[j] - dot);
      }
    });
  }
  return y;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  check(a.rank() == 2 && b.rank() == 2, "concat_channels: inputs must be [C, V]");
  check(a.dim(1) == b.dim(1), "concat_channels: length mismatch");
  const int ca = a.dim(0), cb = b.dim(0), v = a.dim(1);
  const bool rec = should_record({&a, &b});
  Tensor y({ca + cb, v}, 0.0, rec);
  std::copy(a.data().begin(), a.data().end(), y.data().begin());
  std::copy(b.data().begin(), b.data().end(),
            y.data().begin() + static_cast<std::ptrdiff_t>(ca) * v);
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), yi = y.impl();
    Tape::current()->record(yi, [ai, bi, yi, ca, cb, v]() {
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < static_cast<std::size_t>(ca) * v; ++i)
          ai->grad[i] += yi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        const std::size_t off = static_cast<std::size_t>(ca) * v;
        for (std::size_t i = 0; i < static_cast<std::size_t>(cb) * v; ++i)
          bi->grad[i] += yi->grad[off + i];
      }
    });
  }
  return y;
}

Tensor channel_stats(const Tensor& x) {
  check(x.rank() == 2, "channel_stats: input must be [C, V]");
  const int c = x.dim(0), v = x.dim(1);
  const bool rec = should_record({&x});
  Tensor y({4 * c}, 0.0, rec);
  auto mu = std::make_shared<std::vector<double>>(c);
  auto imax = std::make_shared<std::vector<int>>(c);
  auto imin = std::make_shared<std::vector<int>>(c);
  for (int ch = 0; ch < c; ++ch) {
    const double* xr = x.data().data() + static_cast<std::size_t>(ch) * v;
    double m = 0.0;
    int amax = 0, amin = 0;
    for (int i = 0; i < v; ++i) {
      m += xr[i];
      if (xr[i] > xr[amax]) amax = i;
      if (xr[i] < xr[amin]) amin = i;
    }
    m /= v;
    double var = 0.0;
    for (int i = 0; i < v; ++i) var += (xr[i] - m) * (xr[i] - m);
    var /= v;
    (*mu)[ch] = m;
    (*imax)[ch] = amax;
    (*imin)[ch] = amin;
    y.data()[4 * ch + 0] = m;
    y.data()[4 * ch + 1] = var;
    y.data()[4 * ch + 2] = xr[amax];
    y.data()[4 * ch + 3] = xr[amin];
  }
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, mu, imax, imin, c, v]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (int ch = 0; ch < c; ++ch) {
        const double* xr = xi->value.data() + static_cast<std::size_t>(ch) * v;
        double* gx = xi->grad.data() + static_cast<std::size_t>(ch) * v;
        const double gmean = yi->grad[4 * ch + 0];
        const double gvar = yi->grad[4 * ch + 1];
        const double m = (*mu)[ch];
        if (gmean != 0.0)
          for (int i = 0; i < v; ++i) gx[i] += gmean / v;
        if (gvar != 0.0)
          for (int i = 0; i < v; ++i) gx[i] += gvar * 2.0 * (xr[i] - m) / v;
        gx[(*imax)[ch]] += yi->grad[4 * ch + 2];
        gx[(*imin)[ch]] += yi->grad[4 * ch + 3];
      }
    });
  }
  return y;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check(a.rank() == 2 && b.rank() == 2, "matmul: inputs must be matrices");
  check(a.dim(1) == b.dim(0), "matmul: inner dimension mismatch");
  const int m = a.dim(0), kk = a.dim(1), n = b.dim(1);
  const bool rec = should_record({&a, &b});
  Tensor y({m, n}, 0.0, rec);
  kernels::matmul(a.data().data(), b.data().data(), y.data().data(), m, kk, n);
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), yi = y.impl();
    Tape::current()->record(yi, [ai, bi, yi, m, kk, n]() {
      if (ai->requires_grad) {
        ai->ensure_grad();
        kernels::matmul_backward_a(yi->grad.data(), bi->value.data(),
                                   ai->grad.data(), m, kk, n);
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        kernels::matmul_backward_b(yi->grad.data(), ai->value.data(),
                                   bi->grad.data(), m, kk, n);
      }
    });
  }
  return y;
}

Tensor cosine_rows(const Tensor& a, const Tensor& b, double guard) {
  check(a.rank() == 2 && b.rank() == 2, "cosine_rows: inputs must be [C, V]");
  check(a.dim(0) == b.dim(0) && a.dim(1) == b.dim(1),
        "cosine_rows: shape mismatch");
  const int c = a.dim(0), v = a.dim(1);
  const bool rec = should_record({&a, &b});
  Tensor g({c, c}, 0.0, rec);
  auto na = std::make_shared<std::vector<double>>(c);
  auto nb = std::make_shared<std::vector<double>>(c);
  kernels::cosine_rows_forward(a.data().data(), b.data().data(),
                               g.data().data(), na->data(), nb->data(), c, v,
                               guard);
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), gi = g.impl();
    Tape::current()->record(gi, [ai, bi, gi, na, nb, c, v, guard]() {
      if (ai->requires_grad) {
        ai->ensure_grad();
        kernels::cosine_rows_backward_a(gi->grad.data(), ai->value.data(),
                                        bi->value.data(), gi->value.data(),
                                        na->data(), nb->data(), ai->grad.data(),
                                        c, v, guard);
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        kernels::cosine_rows_backward_b(gi->grad.data(), ai->value.data(),
                                        bi->value.data(), gi->value.data(),
                                        na->data(), nb->data(), bi->grad.data(),
                                        c, v, guard);
      }
    });
  }
  return g;
}

Tensor scale_rows(const Tensor& x, const Tensor& w) {
  check(x.rank() == 2, "scale_rows: input must be [C, V]");
  check(w.rank() == 1 && w.dim(0) == x.dim(0), "scale_rows: weight shape");
  const int c = x.dim(0), v = x.dim(1);
  const bool rec = should_record({&x, &w});
  Tensor y({c, v}, 0.0, rec);
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < v; ++i)
      y.data()[static_cast<std::size_t>(ch) * v + i] =
          x.data()[static_cast<std::size_t>(ch) * v + i] * w.data()[ch];
  if (rec) {
    auto xi = x.impl(), wi = w.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, wi, yi, c, v]() {
      for (int ch = 0; ch < c; ++ch) {
        const std::size_t off = static_cast<std::size_t>(ch) * v;
        if (xi->requires_grad) {
          xi->ensure_grad();
          for (int i = 0; i < v; ++i)
            xi->grad[off + i] += yi->grad[off + i] * wi->value[ch];
        }
        if (wi->requires_grad) {
          wi->ensure_grad();
          double acc = 0.0;
          for (int i = 0; i < v; ++i)
            acc += yi->grad[off + i] * xi->value[off + i];
          wi->grad[ch] += acc;
        }
      }
    });
  }
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check(same_shape(a, b), "add: shape mismatch");
  const bool rec = should_record({&a, &b});
  Tensor y(a.shape(), 0.0, rec);
  const std::size_t n = a.data().size();
  for (std::size_t i = 0; i < n; ++i) y.data()[i] = a.data()[i] + b.data()[i];
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), yi = y.impl();
    Tape::current()->record(yi, [ai, bi, yi, n]() {
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) ai->grad[i] += yi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) bi->grad[i] += yi->grad[i];
      }
    });
  }
  return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check(same_shape(a, b), "sub: shape mismatch");
  const bool rec = should_record({&a, &b});
  Tensor y(a.shape(), 0.0, rec);
  const std::size_t n = a.data().size();
  for (std::size_t i = 0; i < n; ++i) y.data()[i] = a.data()[i] - b.data()[i];
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), yi = y.impl();
    Tape::current()->record(yi, [ai, bi, yi, n]() {
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) ai->grad[i] += yi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) bi->grad[i] -= yi->grad[i];
      }
    });
  }
  return y;
}

Tensor scale(const Tensor& x, double c) {
  const bool rec = should_record({&x});
  Tensor y(x.shape(), 0.0, rec);
  const std::size_t n = x.data().size();
  for (std::size_t i = 0; i < n; ++i) y.data()[i] = c * x.data()[i];
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, n, c]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) xi->grad[i] += c * yi->grad[i];
    });
  }
  return y;
}

Tensor sum(const Tensor& x) {
  const bool rec = should_record({&x});
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  Tensor y = Tensor::scalar(acc, rec);
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      const double g = yi->grad[0];
      for (double& gi : xi->grad) gi += g;
    });
  }
  return y;
}

Tensor sse(const Tensor& a, const Tensor& b) {
  check(a.numel() == b.numel(), "sse: element count mismatch");
  const bool rec = should_record({&a, &b});
  double acc = 0.0;
  const std::size_t n = a.data().size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  Tensor y = Tensor::scalar(acc, rec);
  if (rec) {
    auto ai = a.impl(), bi = b.impl(), yi = y.impl();
    Tape::current()->record(yi, [ai, bi, yi, n]() {
      const double g = yi->grad[0];
      if (ai->requires_grad) ai->ensure_grad();
      if (bi->requires_grad) bi->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        const double d = 2.0 * g * (ai->value[i] - bi->value[i]);
        if (ai->requires_grad) ai->grad[i] += d;
        if (bi->requires_grad) bi->grad[i] -= d;
      }
    });
  }
  return y;
}

Tensor group_sparsity(const Tensor& x) {
  check(x.rank() == 2, "group_sparsity: input must be [C, V]");
  const int c = x.dim(0), v = x.dim(1);
  auto rn = std::make_shared<std::vector<double>>(c, 0.0);
  auto cn = std::make_shared<std::vector<double>>(v, 0.0);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < v; ++j) {
      const double xv = x.data()[static_cast<std::size_t>(i) * v + j];
      (*rn)[i] += xv * xv;
      (*cn)[j] += xv * xv;
    }
  double acc = 0.0;
  for (int i = 0; i < c; ++i) {
    (*rn)[i] = std::sqrt((*rn)[i]);
    acc += (*rn)[i];
  }
  for (int j = 0; j < v; ++j) {
    (*cn)[j] = std::sqrt((*cn)[j]);
    acc += (*cn)[j];
  }
  const bool rec = should_record({&x});
  Tensor y = Tensor::scalar(acc, rec);
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, rn, cn, c, v]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      const double g = yi->grad[0];
      for (int i = 0; i < c; ++i) {
        const double ri = std::max((*rn)[i], 1e-12);
        for (int j = 0; j < v; ++j) {
          const double cj = std::max((*cn)[j], 1e-12);
          const double xv = xi->value[static_cast<std::size_t>(i) * v + j];
          xi->grad[static_cast<std::size_t>(i) * v + j] +=
              g * (xv / ri + xv / cj);
        }
      }
    });
  }
  return y;
}

Tensor cross_entropy(const Tensor& probs, const Tensor& onehot, double clamp) {
  check(probs.rank() == 1 && onehot.rank() == 1, "cross_entropy: rank-1 inputs");
  check(probs.dim(0) == onehot.dim(0), "cross_entropy: length mismatch");
  const int n = probs.dim(0);
  {
    double s = 0.0;
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      const double l = onehot.data()[i];
      if (l != 0.0 && l != 1.0) throw UserError("cross_entropy: label not one-hot");
      if (l == 1.0) ++ones;
      s += l;
    }
    if (ones != 1 || s != 1.0) throw UserError("cross_entropy: label not one-hot");
  }
  const bool rec = should_record({&probs});
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc -= onehot.data()[i] * std::log(std::max(probs.data()[i], clamp));
  Tensor y = Tensor::scalar(acc, rec);
  if (rec) {
    auto pi = probs.impl(), li = onehot.impl(), yi = y.impl();
    Tape::current()->record(yi, [pi, li, yi, n, clamp]() {
      if (!pi->requires_grad) return;
      pi->ensure_grad();
      const double g = yi->grad[0];
      for (int i = 0; i < n; ++i)
        if (li->value[i] != 0.0 && pi->value[i] > clamp)
          pi->grad[i] -= g * li->value[i] / pi->value[i];
    });
  }
  return y;
}

Tensor pick(const Tensor& x, int index) {
  check(index >= 0 && index < x.numel(), "pick: index out of range");
  const bool rec = should_record({&x});
  Tensor y = Tensor::scalar(x.data()[static_cast<std::size_t>(index)], rec);
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi, index]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      xi->grad[static_cast<std::size_t>(index)] += yi->grad[0];
    });
  }
  return y;
}

Tensor reshape(const Tensor& x, std::vector<int> shape) {
  std::int64_t n = 1;
  for (int d : shape) n *= d;
  check(n == x.numel(), "reshape: element count mismatch");
  const bool rec = should_record({&x});
  Tensor y(std::move(shape), x.data(), rec);
  if (rec) {
    auto xi = x.impl(), yi = y.impl();
    Tape::current()->record(yi, [xi, yi]() {
      if (!xi->requires_grad) return;
      xi->ensure_grad();
      for (std::size_t i = 0; i < xi->grad.size(); ++i)
        xi->grad[i] += yi->grad[i];
    });
  }
  return y;
}

}  // namespace ppgecg::ad
