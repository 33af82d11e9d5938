#include "ppgecg/unet.hpp"

#include <cmath>

#include "ppgecg/error.hpp"
#include "ppgecg/rng.hpp"

namespace ppgecg::net {

using ad::Padding;
using ad::Tensor;

namespace {

ConvLayer make_layer(Rng& rng, ConvSpec s, bool transposed, bool normalized) {
  ConvLayer l;
  l.spec = s;
  l.transposed = transposed;
  l.normalized = normalized;
  l.activated = normalized;
  l.pad = Padding::kSame;
  const double a = std::sqrt(6.0 / (s.n_in * s.k));
  l.w = Tensor(transposed ? std::vector<int>{s.n_in, s.n_out, s.k}
                          : std::vector<int>{s.n_out, s.n_in, s.k},
               0.0, true);
  for (double& v : l.w.data()) v = rng.uniform(-a, a);
  l.b = Tensor({s.n_out}, 0.0, true);
  if (normalized) {
    l.ln_g = Tensor({s.n_out}, 1.0, true);
    l.ln_b = Tensor({s.n_out}, 0.0, true);
  }
  return l;
}

}  // namespace

UnetModel UnetModel::init(int length, std::uint64_t seed) {
  UnetModel u;
  u.length = length;
  u.init_seed = seed;
  Rng rng(Rng::mix(seed, 0x7e57u));
  u.enc1 = make_layer(rng, {1, 60, 30, 1}, false, true);
  u.enc2 = make_layer(rng, {60, 40, 15, 1}, false, true);
  u.enc3 = make_layer(rng, {40, 20, 5, 1}, false, true);
  u.dec1 = make_layer(rng, {20, 40, 5, 1}, true, true);
  u.dec2 = make_layer(rng, {40, 60, 15, 1}, true, true);
  u.gen = make_layer(rng, {60, 1, 30, 1}, true, false);
  return u;
}

Tensor UnetModel::forward(const Tensor& input) const {
  if (input.rank() != 1 || input.dim(0) != length)
    throw UserError("unet: input must have length " + std::to_string(length));
  Tensor x = ad::reshape(input, {1, length});
  Tensor e1 = conv_block(enc1, x);
  Tensor e2 = conv_block(enc2, e1);
  Tensor e3 = conv_block(enc3, e2);
  Tensor d1 = ad::add(conv_block(dec1, e3), e2);  // mirrored 40-channel pair
  Tensor d2 = ad::add(conv_block(dec2, d1), e1);  // mirrored 60-channel pair
  Tensor y = conv_block(gen, d2);
  return ad::reshape(y, {length});
}

std::vector<std::pair<std::string, Tensor>> UnetModel::named_params() const {
  std::vector<std::pair<std::string, Tensor>> out;
  auto push = [&](const std::string& name, const ConvLayer& l) {
    out.emplace_back(name + ".w", l.w);
    out.emplace_back(name + ".b", l.b);
    if (l.normalized) {
      out.emplace_back(name + ".ln_g", l.ln_g);
      out.emplace_back(name + ".ln_b", l.ln_b);
    }
  };
  push("enc1", enc1);
  push("enc2", enc2);
  push("enc3", enc3);
  push("dec1", dec1);
  push("dec2", dec2);
  push("gen", gen);
  return out;
}

std::int64_t UnetModel::param_count() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : named_params()) n += t.numel();
  return n;
}

}  // namespace ppgecg::net
