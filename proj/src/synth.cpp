#include "ppgecg/synth.hpp"

#include <cmath>

#include "ppgecg/error.hpp"
#include "ppgecg/rng.hpp"

namespace ppgecg {

namespace {

// One heartbeat parameterized on phase [0, 1). Both waveforms live in [0, 1].
struct PulseParams {
  // PPG
  double base = 0.16;
  double sys_a = 0.62, sys_t = 0.28, sys_w = 0.10;
  double dia_a = 0.22, dia_t = 0.56, dia_w = 0.09;
  double notch_d = 0.12, notch_t = 0.445, notch_w = 0.035;
  double infl_a = 0.0, infl_t = 0.47, infl_w = 0.05;  // CAD-like inflection
  double lift = 0.05;  // sin^2 lift keeping the onset at phase 0
  // ECG bumps: amplitude, center, width
  double p_a = 0.10, p_t = 0.86, p_w = 0.035;
  double q_a = -0.10, q_t = 0.965, q_w = 0.016;
  double r_a = 0.55, r_t = 0.0, r_w = 0.022;
  double s_a = -0.16, s_t = 0.045, s_w = 0.018;
  double t_a = 0.18, t_t = 0.30, t_w = 0.055;
  double st_a = 0.0, st_t = 0.16, st_w = 0.07;  // ST-segment offset
  double ecg_base = 0.30;
};

double wrapped_bump(double phi, double mu, double w) {
  double d = std::abs(phi - mu);
  d = std::min(d, 1.0 - d);
  return std::exp(-0.5 * d * d / (w * w));
}

double ppg_at(double phi, const PulseParams& p) {
  double v = p.base;
  v += p.sys_a * wrapped_bump(phi, p.sys_t, p.sys_w);
  v += p.dia_a * wrapped_bump(phi, p.dia_t, p.dia_w);
  v -= p.notch_d * wrapped_bump(phi, p.notch_t, p.notch_w);
  v += p.infl_a * wrapped_bump(phi, p.infl_t, p.infl_w);
  const double s = std::sin(M_PI * phi);
  v += p.lift * s * s;
  return v;
}

double ecg_at(double phi, const PulseParams& p) {
  double v = p.ecg_base;
  v += p.p_a * wrapped_bump(phi, p.p_t, p.p_w);
  v += p.q_a * wrapped_bump(phi, p.q_t, p.q_w);
  v += p.r_a * wrapped_bump(phi, p.r_t, p.r_w);
  v += p.s_a * wrapped_bump(phi, p.s_t, p.s_w);
  v += p.t_a * wrapped_bump(phi, p.t_t, p.t_w);
  v += p.st_a * wrapped_bump(phi, p.st_t, p.st_w);
  return v;
}

void apply_class(PulseParams& p, int class_id) {
  switch (class_id % 5) {
    case 0:  // CHF-like: broad QRS, weak T, sluggish upstroke
      p.r_w *= 1.8;
      p.t_a *= 0.55;
      p.sys_w *= 1.30;
      p.sys_a *= 0.90;
      p.dia_a *= 0.80;
      break;
    case 1:  // ST-MI-like: elevated ST segment, brisk upstroke
      p.st_a = 0.14;
      p.t_a *= 1.10;
      p.sys_t -= 0.03;
      p.sys_w *= 0.85;
      p.notch_d *= 0.60;
      break;
    case 2:  // NST-MI-like: inverted T, deep late notch
      p.t_a = -0.12;
      p.st_a = -0.03;
      p.notch_d *= 1.60;
      p.dia_t += 0.04;
      p.dia_a *= 1.25;
      break;
    case 3:  // HYPO-like: globally damped amplitudes, late peak
      p.r_a *= 0.75;
      p.t_a *= 0.75;
      p.p_a *= 0.75;
      p.q_a *= 0.75;
      p.s_a *= 0.75;
      p.sys_a *= 0.62;
      p.dia_a *= 0.50;
      p.sys_t += 0.05;
      break;
    case 4:  // CAD-like: inverted QRS, inflection on the descending slope
      p.r_a = -0.42;
      p.s_a = 0.12;
      p.q_a = 0.04;
      p.t_a = 0.12;
      p.notch_d *= 0.30;
      p.infl_a = 0.10;
      break;
  }
}

// Subject-level latent offsets; the same draws steer both waveforms so the
// PPG-to-ECG relation stays a function.
void apply_subject(PulseParams& p, Rng& rng) {
  const double z0 = rng.normal(), z1 = rng.normal(), z2 = rng.normal();
  const double z3 = rng.normal(), z4 = rng.normal(), z5 = rng.normal();
  p.sys_t += 0.012 * z0;
  p.sys_w *= std::exp(0.08 * z1);
  p.sys_a *= std::exp(0.06 * z2);
  p.dia_a *= std::exp(0.10 * z3);
  p.notch_d *= std::exp(0.10 * z4);
  p.base += 0.02 * z5;
  p.r_w *= std::exp(0.05 * z1);
  p.r_a *= std::exp(0.04 * z2);
  p.t_a *= std::exp(0.08 * z3);
  p.t_t += 0.008 * z0;
  p.p_a *= std::exp(0.06 * z4);
}

// Per-cycle jitter, again tied across the two waveforms.
void apply_cycle(PulseParams& p, Rng& rng) {
  const double j0 = rng.normal(), j1 = rng.normal();
  const double amp = std::exp(0.02 * j0);
  p.sys_a *= amp;
  p.dia_a *= amp;
  p.r_a *= amp;
  p.t_a *= amp;
  p.sys_t += 0.004 * j1;
  p.t_t += 0.003 * j1;
}

PulseParams make_params(int class_id, std::uint64_t subject_key,
                        std::uint64_t cycle_key, bool with_cycle_jitter) {
  PulseParams p;
  apply_class(p, class_id);
  Rng srng(subject_key);
  apply_subject(p, srng);
  if (with_cycle_jitter) {
    Rng crng(cycle_key);
    apply_cycle(p, crng);
  }
  return p;
}

}  // namespace

std::vector<CycleExample> synthesize_dataset(int n_subjects,
                                             int cycles_per_subject,
                                             int n_classes, std::uint64_t seed,
                                             int length) {
  if (n_subjects < 1 || cycles_per_subject < 1 || n_classes < 1 || length < 16)
    throw UserError("synthesize_dataset: all counts must be positive");
  std::vector<CycleExample> out;
  out.reserve(static_cast<std::size_t>(n_subjects) * cycles_per_subject);
  for (int s = 0; s < n_subjects; ++s) {
    const int cls = s % n_classes;
    const std::uint64_t skey = Rng::mix(seed, 0x5u + static_cast<std::uint64_t>(s));
    for (int c = 0; c < cycles_per_subject; ++c) {
      const std::uint64_t ckey = Rng::mix(skey, 0x9u + static_cast<std::uint64_t>(c));
      const PulseParams p = make_params(cls, skey, ckey, true);
      Rng nrng(Rng::mix(ckey, 0x11u));
      CycleExample ex;
      ex.ppg.resize(length);
      ex.ecg.emplace(length);
      for (int i = 0; i < length; ++i) {
        const double phi = static_cast<double>(i) / length;
        ex.ppg[i] = ppg_at(phi, p) + 0.004 * nrng.normal();
        (*ex.ecg)[i] = ecg_at(phi, p);
      }
      ex.label = cls;
      ex.source = "s" + std::to_string(s) + "#" + std::to_string(c);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> synth_mean_template(
    int class_id, int length) {
  PulseParams p;
  apply_class(p, class_id);
  std::vector<double> ppg(length), ecg(length);
  for (int i = 0; i < length; ++i) {
    const double phi = static_cast<double>(i) / length;
    ppg[i] = ppg_at(phi, p);
    ecg[i] = ecg_at(phi, p);
  }
  return {ppg, ecg};
}

RawRecord synthesize_record(const RawRecordOptions& opt) {
  if (opt.n_cycles < 1 || opt.fs <= 0)
    throw UserError("synthesize_record: bad options");
  std::vector<double> durations = opt.durations;
  durations.resize(static_cast<std::size_t>(opt.n_cycles), opt.duration_s);

  const double lead_s = opt.lead_in_s >= 0 ? opt.lead_in_s : durations[0];
  const int lead_n = static_cast<int>(std::lround(lead_s * opt.fs));
  const int ptt_n = static_cast<int>(std::lround(opt.ptt_s * opt.fs));

  // Cycle start indices (PPG onsets); the stream ends half a cycle after the
  // last onset, leaving the final cycle unterminated.
  std::vector<int> starts(static_cast<std::size_t>(opt.n_cycles));
  std::vector<int> lens(static_cast<std::size_t>(opt.n_cycles));
  int pos = lead_n;
  for (int k = 0; k < opt.n_cycles; ++k) {
    starts[k] = pos;
    lens[k] = std::max(2, static_cast<int>(std::lround(durations[k] * opt.fs)));
    pos += lens[k];
  }
  const int total = starts.back() + lens.back() / 2;

  const std::uint64_t skey = Rng::mix(opt.seed, 0x5u);
  Rng nrng(Rng::mix(opt.seed, 0x21u));

  RawRecord out;
  out.record.fs = opt.fs;
  out.record.label = opt.class_id;
  out.record.subject_id = "synth" + std::to_string(opt.seed);
  out.record.ppg.resize(total);
  if (opt.with_ecg) out.record.ecg.resize(total);

  auto cycle_of = [&](int i, int shift) {
    // Cycle containing sample i on a grid shifted left by `shift`, plus the
    // phase inside it. The lead-in and the unterminated tail wrap around.
    int k = opt.n_cycles - 1;
    while (k > 0 && i < starts[k] - shift) --k;
    double phase = static_cast<double>(i - (starts[k] - shift)) / lens[k];
    phase -= std::floor(phase);
    return std::pair<int, double>(k, phase);
  };

  std::vector<PulseParams> params(static_cast<std::size_t>(opt.n_cycles));
  for (int k = 0; k < opt.n_cycles; ++k)
    params[k] = make_params(opt.class_id, skey,
                            Rng::mix(skey, 0x9u + static_cast<std::uint64_t>(k)),
                            true);

  for (int i = 0; i < total; ++i) {
    const double t = i / opt.fs;
    const double trend =
        opt.trend_amp * (std::sin(2.0 * M_PI * 0.15 * t) + 0.3 * t / 10.0);
    {
      auto [k, phi] = cycle_of(i, 0);
      out.record.ppg[i] =
          ppg_at(phi, params[k]) + trend +
          (opt.noise > 0 ? opt.noise * nrng.normal() : 0.0);
    }
    if (opt.with_ecg) {
      auto [k, phi] = cycle_of(i, ptt_n);
      out.record.ecg[i] =
          ecg_at(phi, params[k]) + trend +
          (opt.noise > 0 ? opt.noise * nrng.normal() : 0.0);
    }
  }

  out.truth.ppg_onsets = starts;
  if (opt.with_ecg)
    for (int k = 0; k < opt.n_cycles; ++k)
      if (starts[k] - ptt_n >= 0) out.truth.r_peaks.push_back(starts[k] - ptt_n);
  return out;
}

}  // namespace ppgecg
