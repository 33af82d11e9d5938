#pragma once

#include <vector>

#include "ppgecg/record.hpp"

namespace ppgecg {

// Removes baseline wander by subtracting the least-squares projection onto a
// cubic B-spline trend space with knots every 1/(2*cutoff_hz) seconds.
// Being a projection, the operation is exactly idempotent, the residual has
// zero mean, and affine trends are removed completely. Inputs shorter than
// five samples fall back to straight-line removal.
std::vector<double> detrend(const std::vector<double>& x, double fs,
                            double cutoff_hz = 0.5);

// PPG onsets: local minima preceding maximal-upslope points. R-peaks:
// amplitude-thresholded peak picking on the squared derivative, refined to
// the dominant extremum relative to the median level. Expects detrended (or
// generator-clean) streams; throws "no cycles found" on flat input.
FiducialSet detect_fiducials(const WaveformRecord& rec);

struct SegmentOptions {
  int length = 268;
  double min_duration_s = 0.33;  // 180 bpm
  double max_duration_s = 2.0;   // 30 bpm
  bool normalize = true;         // per-record min-max to [0,1]
};

struct SegmentResult {
  std::vector<CycleExample> cycles;
  int dropped_duration = 0;
  int dropped_unpaired = 0;
};

// PPG cycles span onset_k..onset_{k+1}; the paired ECG cycle spans the
// R-peak nearest to onset_k (within half a cycle) to the following R-peak.
// Both are resampled to `length`. Cycles outside the duration gate are
// dropped and counted.
SegmentResult segment_and_align(const WaveformRecord& rec,
                                const FiducialSet& fid,
                                const SegmentOptions& opt);

// Not-a-knot cubic spline interpolation onto `length` uniformly spaced
// points over [0, x.size()-1]. Endpoints are preserved exactly.
std::vector<double> resample_cycle(const std::vector<double>& x, int length);

}  // namespace ppgecg
