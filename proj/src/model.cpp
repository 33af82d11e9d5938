#include "ppgecg/model.hpp"

#include <cmath>

#include "ppgecg/error.hpp"
#include "ppgecg/rng.hpp"

namespace ppgecg::net {

using ad::Padding;
using ad::Tensor;

std::vector<int> NetConfig::cls_lengths() const {
  std::vector<int> out;
  int v = length;
  for (const ConvSpec& c : cls) {
    v = (v - c.k) / c.stride + 1;
    out.push_back(v);
  }
  return out;
}

void NetConfig::validate() const {
  if (length < 16) throw UserError("config: length too short");
  const int c = channels();
  auto module_ok = [&](const std::array<ConvSpec, 2>& m) {
    return m[0].n_in == c && m[1].n_in == m[0].n_out &&
           m[0].n_out + m[1].n_out == c;
  };
  if (fems.empty() || ftms.empty())
    throw UserError("config: need at least one FEM and FTM");
  for (const auto& m : fems)
    if (!module_ok(m)) throw UserError("config: FEM channel arithmetic broken");
  for (const auto& m : ftms)
    if (!module_ok(m)) throw UserError("config: FTM channel arithmetic broken");
  if (recursive && (fems.size() != 1 || ftms.size() != 1))
    throw UserError("config: recursive variant uses one shared module");
  if (has_diagnosis) {
    if (cls[0].n_in != c) throw UserError("config: classifier input channels");
    if (cls[1].n_in != cls[0].n_out || cls[2].n_in != cls[1].n_out)
      throw UserError("config: classifier channel chain");
    for (int l : cls_lengths())
      if (l < 1) throw UserError("config: classifier geometry underflow");
  }
}

NetConfig NetConfig::paper_full(int n_classes) {
  NetConfig c;
  c.length = 268;
  c.n_classes = n_classes;
  c.first_conv = {1, 60, 30, 1};
  c.fems = {{{{60, 40, 15, 1}, {40, 20, 3, 1}}},
            {{{60, 40, 5, 1}, {40, 20, 3, 1}}}};
  c.ftms = {{{{60, 40, 5, 1}, {40, 20, 3, 1}}},
            {{{60, 40, 15, 1}, {40, 20, 3, 1}}}};
  c.gen_kernel = 30;
  c.attn_hidden = 20;
  c.cls = {{{60, 30, 30, 2}, {30, 20, 10, 2}, {20, 1, 4, 1}}};
  c.cls_fc_hidden = 10;
  c.validate();
  return c;
}

NetConfig NetConfig::tiny(int length, int n_classes) {
  NetConfig c;
  c.length = length;
  c.n_classes = n_classes;
  c.first_conv = {1, 8, 7, 1};
  c.fems = {{{{8, 6, 5, 1}, {6, 2, 3, 1}}}, {{{8, 6, 3, 1}, {6, 2, 3, 1}}}};
  c.ftms = {{{{8, 6, 3, 1}, {6, 2, 3, 1}}}, {{{8, 6, 5, 1}, {6, 2, 3, 1}}}};
  c.gen_kernel = 7;
  c.attn_hidden = 4;
  c.cls = {{{8, 4, 5, 2}, {4, 2, 4, 2}, {2, 1, 2, 1}}};
  c.cls_fc_hidden = 4;
  c.validate();
  return c;
}

NetConfig NetConfig::compressed() const {
  if (recursive) throw UserError("config: already compressed");
  auto half = [](int n) { return (n + 1) / 2; };
  NetConfig c = *this;
  c.recursive = true;
  c.recursion = static_cast<int>(fems.size());
  c.first_conv.n_out = half(first_conv.n_out);
  const int ch = c.first_conv.n_out;
  auto half_module = [&](const std::array<ConvSpec, 2>& m) {
    std::array<ConvSpec, 2> out = m;
    out[0].n_in = ch;
    out[0].n_out = half(m[0].n_out);
    out[1].n_in = out[0].n_out;
    out[1].n_out = half(m[1].n_out);
    return out;
  };
  c.fems = {half_module(fems.front())};
  c.ftms = {half_module(ftms.back())};
  c.attn_hidden = half(attn_hidden);
  c.cls[0] = {ch, half(cls[0].n_out), cls[0].k, cls[0].stride};
  c.cls[1] = {c.cls[0].n_out, half(cls[1].n_out), cls[1].k, cls[1].stride};
  c.cls[2] = {c.cls[1].n_out, cls[2].n_out, cls[2].k, cls[2].stride};
  c.validate();
  return c;
}

NetConfig NetConfig::without_diagnosis() const {
  NetConfig c = *this;
  c.has_diagnosis = false;
  return c;
}

namespace {

Tensor uniform_fan_in(Rng& rng, std::vector<int> shape, int fan_in) {
  const double a = std::sqrt(6.0 / fan_in);
  Tensor t(std::move(shape), 0.0, true);
  for (double& v : t.data()) v = rng.uniform(-a, a);
  return t;
}

ConvLayer init_conv(Rng& rng, const ConvSpec& s, bool transposed,
                    bool normalized, bool activated, Padding pad) {
  ConvLayer l;
  l.spec = s;
  l.transposed = transposed;
  l.normalized = normalized;
  l.activated = activated;
  l.pad = pad;
  const int fan_in = s.n_in * s.k;
  l.w = transposed ? uniform_fan_in(rng, {s.n_in, s.n_out, s.k}, fan_in)
                   : uniform_fan_in(rng, {s.n_out, s.n_in, s.k}, fan_in);
  l.b = Tensor({s.n_out}, 0.0, true);
  if (normalized) {
    l.ln_g = Tensor({s.n_out}, 1.0, true);
    l.ln_b = Tensor({s.n_out}, 0.0, true);
  }
  return l;
}

DenseLayer init_dense(Rng& rng, int n_out, int n_in) {
  DenseLayer d;
  d.w = uniform_fan_in(rng, {n_out, n_in}, n_in);
  d.b = Tensor({n_out}, 0.0, true);
  return d;
}

void push_conv(std::vector<std::pair<std::string, Tensor>>& out,
               const std::string& name, const ConvLayer& l) {
  out.emplace_back(name + ".w", l.w);
  out.emplace_back(name + ".b", l.b);
  if (l.normalized) {
    out.emplace_back(name + ".ln_g", l.ln_g);
    out.emplace_back(name + ".ln_b", l.ln_b);
  }
}

void push_dense(std::vector<std::pair<std::string, Tensor>>& out,
                const std::string& name, const DenseLayer& d) {
  out.emplace_back(name + ".w", d.w);
  out.emplace_back(name + ".b", d.b);
}

}  // namespace

ModelParams ModelParams::init(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams m;
  m.cfg = cfg;
  m.init_seed = seed;
  Rng rng(Rng::mix(seed, 0xabcdef12u));

  m.first_conv = init_conv(rng, cfg.first_conv, false, true, true, Padding::kSame);
  for (const auto& spec : cfg.fems)
    m.fems.push_back({init_conv(rng, spec[0], false, true, true, Padding::kSame),
                      init_conv(rng, spec[1], false, true, true, Padding::kSame)});
  for (const auto& spec : cfg.ftms)
    m.ftms.push_back({init_conv(rng, spec[0], true, true, true, Padding::kSame),
                      init_conv(rng, spec[1], true, true, true, Padding::kSame)});

  const int c = cfg.channels();
  m.theta = Tensor({c, c}, 0.0, true);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      m.theta.data()[static_cast<std::size_t>(i) * c + j] =
          (i == j ? 1.0 : 0.0) + 0.01 * rng.normal();

  m.gen = init_conv(rng, {c, 1, cfg.gen_kernel, 1}, true, false, false,
                    Padding::kSame);

  if (cfg.has_diagnosis) {
    m.attn1 = init_dense(rng, cfg.attn_hidden, cfg.stats_dim());
    m.attn2 = init_dense(rng, c, cfg.attn_hidden);
    m.cls1 = init_conv(rng, cfg.cls[0], false, true, true, Padding::kValid);
    m.cls2 = init_conv(rng, cfg.cls[1], false, true, true, Padding::kValid);
    m.cls3 = init_conv(rng, cfg.cls[2], false, true, true, Padding::kValid);
    m.fc1 = init_dense(rng, cfg.cls_fc_hidden, cfg.cls_fc_in());
    m.fc2 = init_dense(rng, cfg.n_classes, cfg.cls_fc_hidden);
  }
  return m;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named_params() const {
  std::vector<std::pair<std::string, Tensor>> out;
  push_conv(out, "encoder.conv", first_conv);
  for (std::size_t i = 0; i < fems.size(); ++i) {
    const std::string base =
        cfg.recursive ? "encoder.rfem" : "encoder.fem" + std::to_string(i + 1);
    push_conv(out, base + ".c1", fems[i][0]);
    push_conv(out, base + ".c2", fems[i][1]);
  }
  for (std::size_t i = 0; i < ftms.size(); ++i) {
    const std::string base =
        cfg.recursive ? "decoder.rftm" : "decoder.ftm" + std::to_string(i + 1);
    push_conv(out, base + ".c1", ftms[i][0]);
    push_conv(out, base + ".c2", ftms[i][1]);
  }
  out.emplace_back("fusion.theta", theta);
  push_conv(out, "decoder.gen", gen);
  if (cfg.has_diagnosis) {
    push_dense(out, "diag.attn1", attn1);
    push_dense(out, "diag.attn2", attn2);
    push_conv(out, "diag.cls1", cls1);
    push_conv(out, "diag.cls2", cls2);
    push_conv(out, "diag.cls3", cls3);
    push_dense(out, "diag.fc1", fc1);
    push_dense(out, "diag.fc2", fc2);
  }
  return out;
}

std::int64_t ModelParams::param_count() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : named_params()) n += t.numel();
  return n;
}

std::vector<std::pair<std::string, std::int64_t>> ModelParams::census() const {
  // Aggregated per layer (weights + bias + norm affine).
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (const auto& [name, t] : named_params()) {
    const std::string layer = name.substr(0, name.rfind('.'));
    if (!out.empty() && out.back().first == layer)
      out.back().second += t.numel();
    else
      out.emplace_back(layer, t.numel());
  }
  return out;
}

void ModelParams::set_requires_grad(bool rg) const {
  for (auto& [name, t] : named_params()) const_cast<Tensor&>(t).set_requires_grad(rg);
}

void ModelParams::zero_grads() const {
  for (auto& [name, t] : named_params()) {
    const_cast<Tensor&>(t).ensure_grad();
    const_cast<Tensor&>(t).zero_grad();
  }
}

ModelParams ModelParams::clone() const {
  ModelParams m = *this;
  auto copy_conv = [](ConvLayer& l) {
    l.w = l.w.clone();
    l.b = l.b.clone();
    if (l.normalized) {
      l.ln_g = l.ln_g.clone();
      l.ln_b = l.ln_b.clone();
    }
  };
  auto copy_dense = [](DenseLayer& d) {
    d.w = d.w.clone();
    d.b = d.b.clone();
  };
  copy_conv(m.first_conv);
  for (auto& f : m.fems) {
    copy_conv(f[0]);
    copy_conv(f[1]);
  }
  for (auto& f : m.ftms) {
    copy_conv(f[0]);
    copy_conv(f[1]);
  }
  m.theta = m.theta.clone();
  copy_conv(m.gen);
  if (cfg.has_diagnosis) {
    copy_dense(m.attn1);
    copy_dense(m.attn2);
    copy_conv(m.cls1);
    copy_conv(m.cls2);
    copy_conv(m.cls3);
    copy_dense(m.fc1);
    copy_dense(m.fc2);
  }
  return m;
}

Tensor conv_block(const ConvLayer& layer, const Tensor& x, double ln_eps) {
  Tensor y = layer.transposed
                 ? ad::tconv1d(x, layer.w, layer.b, layer.spec.stride, layer.pad)
                 : ad::conv1d(x, layer.w, layer.b, layer.spec.stride, layer.pad);
  if (layer.normalized) y = ad::layer_norm(y, layer.ln_g, layer.ln_b, ln_eps);
  if (layer.activated) y = ad::relu(y);
  return y;
}

Tensor fem_forward(const Tensor& x, const std::array<ConvLayer, 2>& m) {
  Tensor a = conv_block(m[0], x);
  Tensor b = conv_block(m[1], a);
  return ad::concat_channels(a, b);
}

Tensor ftm_forward(const Tensor& x, const std::array<ConvLayer, 2>& m) {
  return fem_forward(x, m);
}

std::pair<Tensor, Tensor> fusion_attention(const Tensor& f1, const Tensor& ft,
                                           const Tensor& theta) {
  Tensor g = ad::cosine_rows(f1, ft);
  Tensor phi = ad::matmul(g, theta);
  Tensor alpha = ad::softmax_rows(phi);
  Tensor fstar = ad::add(ft, ad::matmul(alpha, f1));
  return {fstar, alpha};
}

Tensor generate_ecg(const Tensor& fstar, const ConvLayer& gen) {
  Tensor y = conv_block(gen, fstar);  // no norm, no activation
  return ad::reshape(y, {y.dim(1)});
}

std::pair<Tensor, Tensor> diagnose(const Tensor& fstar, const ModelParams& m) {
  if (!m.cfg.has_diagnosis)
    throw UserError("diagnose: model has no diagnosis branch");
  Tensor stats = ad::channel_stats(fstar);
  Tensor h = ad::relu(ad::linear(m.attn1.w, stats, m.attn1.b));
  Tensor w = ad::sigmoid(ad::linear(m.attn2.w, h, m.attn2.b));
  Tensor gated = ad::scale_rows(fstar, w);
  Tensor c1 = conv_block(m.cls1, gated);
  Tensor c2 = conv_block(m.cls2, c1);
  Tensor c3 = conv_block(m.cls3, c2);
  Tensor flat = ad::reshape(c3, {c3.dim(0) * c3.dim(1)});
  Tensor h2 = ad::relu(ad::linear(m.fc1.w, flat, m.fc1.b));
  Tensor logits = ad::linear(m.fc2.w, h2, m.fc2.b);
  return {ad::softmax_rows(logits), w};
}

ForwardOutputs forward_full(const ModelParams& m, const Tensor& input) {
  if (input.rank() != 1 || input.dim(0) != m.cfg.length)
    throw UserError("forward: input must have length " +
                    std::to_string(m.cfg.length));
  Tensor x = ad::reshape(input, {1, m.cfg.length});

  ForwardOutputs out;
  out.f1 = conv_block(m.first_conv, x);

  Tensor enc = out.f1;
  if (m.cfg.recursive) {
    for (int r = 0; r < m.cfg.recursion; ++r) enc = fem_forward(enc, m.fems[0]);
  } else {
    for (const auto& fem : m.fems) enc = fem_forward(enc, fem);
  }

  Tensor dec = enc;
  if (m.cfg.recursive) {
    for (int r = 0; r < m.cfg.recursion; ++r) dec = ftm_forward(dec, m.ftms[0]);
  } else {
    for (const auto& ftm : m.ftms) dec = ftm_forward(dec, ftm);
  }

  auto [fstar, alpha] = fusion_attention(out.f1, dec, m.theta);
  out.fstar = fstar;
  out.alpha = alpha;
  out.ecg_hat = generate_ecg(fstar, m.gen);
  if (m.cfg.has_diagnosis) {
    auto [probs, w] = diagnose(fstar, m);
    out.class_probs = probs;
    out.weights = w;
  }
  return out;
}

ForwardOutputs forward_full(const ModelParams& m,
                            const std::vector<double>& input) {
  return forward_full(m, Tensor({static_cast<int>(input.size())}, input));
}

}  // namespace ppgecg::net
