#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ppgecg/record.hpp"

namespace ppgecg {

// Synthetic PPG/ECG for desk-scale validation. ECG cycles are sums of
// wrapped Gaussian bumps (P/Q/R/S/T plus an ST-segment bump); PPG cycles are
// an ascending/descending slope pair with a dicrotic notch. Each class morphs
// the template (ST elevation, inverted QRS, damped amplitudes, ...), subjects
// draw latent offsets, cycles add small jitter; PPG and ECG derive from the
// same latent state, so the PPG-to-ECG map is deterministic and learnable.
// Everything is a pure function of the seed.

// Ready-made aligned cycles of length L: ppg[0] is the onset, ecg[0] the
// R-peak. Subject s gets class s % n_classes.
std::vector<CycleExample> synthesize_dataset(int n_subjects,
                                             int cycles_per_subject,
                                             int n_classes, std::uint64_t seed,
                                             int length = 268);

// Noise/jitter-free class template (for separation checks and debugging).
std::pair<std::vector<double>, std::vector<double>> synth_mean_template(
    int class_id, int length);

// Raw-stream generator for exercising the preprocessing pipeline.
struct RawRecordOptions {
  int n_cycles = 10;             // number of onsets emitted
  double fs = 125.0;
  double duration_s = 1.0;       // default cycle duration
  std::vector<double> durations; // optional per-cycle override
  double lead_in_s = -1.0;       // default: one cycle
  double ptt_s = 0.2;            // R-peak precedes the PPG onset by this much
  bool with_ecg = true;
  int class_id = 0;
  double trend_amp = 0.0;        // slow additive drift on both streams
  double noise = 0.0;
  std::uint64_t seed = 1;
};

struct RawRecord {
  WaveformRecord record;
  FiducialSet truth;  // ground-truth onset / R-peak indices
};

RawRecord synthesize_record(const RawRecordOptions& opt);

}  // namespace ppgecg
