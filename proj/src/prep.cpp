#include "ppgecg/prep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ppgecg/error.hpp"

namespace ppgecg {

namespace {

// Cardinal cubic B-spline, support (-2, 2).
double bspline3(double u) {
  const double a = std::abs(u);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    const double t = 2.0 - a;
    return t * t * t / 6.0;
  }
  return 2.0 / 3.0 - a * a + a * a * a / 2.0;
}

// Banded Cholesky (lower), bandwidth bw; a is row-major n x (bw+1) where
// a[i][j] holds A[i][i-bw+j].
void band_cholesky(std::vector<double>& a, int n, int bw) {
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - bw); j <= i; ++j) {
      double s = a[static_cast<std::size_t>(i) * (bw + 1) + (j - i + bw)];
      for (int k = std::max(0, i - bw); k < j; ++k)
        s -= a[static_cast<std::size_t>(i) * (bw + 1) + (k - i + bw)] *
             a[static_cast<std::size_t>(j) * (bw + 1) + (k - j + bw)];
      if (i == j) {
        if (s <= 0.0) throw UserError("detrend: singular trend basis");
        a[static_cast<std::size_t>(i) * (bw + 1) + bw] = std::sqrt(s);
      } else {
        a[static_cast<std::size_t>(i) * (bw + 1) + (j - i + bw)] =
            s / a[static_cast<std::size_t>(j) * (bw + 1) + bw];
      }
    }
  }
}

void band_solve(const std::vector<double>& l, std::vector<double>& b, int n,
                int bw) {
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = std::max(0, i - bw); k < i; ++k)
      s -= l[static_cast<std::size_t>(i) * (bw + 1) + (k - i + bw)] * b[k];
    b[i] = s / l[static_cast<std::size_t>(i) * (bw + 1) + bw];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    const int hi = std::min(n - 1, i + bw);
    for (int k = i + 1; k <= hi; ++k)
      s -= l[static_cast<std::size_t>(k) * (bw + 1) + (i - k + bw)] * b[k];
    b[i] = s / l[static_cast<std::size_t>(i) * (bw + 1) + bw];
  }
}

std::vector<double> subtract_line(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += i;
    sy += x[i];
    sxx += double(i) * i;
    sxy += double(i) * x[i];
  }
  const double det = n * sxx - sx * sx;
  const double b = det != 0.0 ? (n * sxy - sx * sy) / det : 0.0;
  const double a = (sy - b * sx) / n;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - (a + b * i);
  return out;
}

struct Peak {
  int index;
  double weight;
};

std::vector<int> enforce_min_distance(std::vector<Peak> cand, int min_dist) {
  std::sort(cand.begin(), cand.end(), [](const Peak& a, const Peak& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.index < b.index;
  });
  std::vector<int> kept;
  for (const Peak& p : cand) {
    bool ok = true;
    for (int k : kept)
      if (std::abs(k - p.index) < min_dist) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(p.index);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

std::vector<double> detrend(const std::vector<double>& x, double fs,
                            double cutoff_hz) {
  if (x.size() < 3) throw UserError("detrend: sequence too short");
  if (fs <= 0 || cutoff_hz <= 0) throw UserError("detrend: fs and cutoff must be positive");
  const int n = static_cast<int>(x.size());

  const double knot_samples = fs / (2.0 * cutoff_hz);
  const int m_intervals = std::max(
      1, static_cast<int>(std::ceil((n - 1) / knot_samples)));
  const int nb = m_intervals + 3;  // basis functions j = -1 .. m+1
  if (nb > n || n < 5) return subtract_line(x);

  // Normal equations for the banded design matrix N[i][j] = B(i/h - (j-1)).
  const double h = knot_samples;
  const int bw = 3;
  std::vector<double> gram(static_cast<std::size_t>(nb) * (bw + 1), 0.0);
  std::vector<double> rhs(nb, 0.0);
  for (int i = 0; i < n; ++i) {
    const double u = i / h;
    const int j0 = std::max(0, static_cast<int>(std::floor(u)) - 1);
    const int j1 = std::min(nb - 1, j0 + 3);
    double bv[4];
    for (int j = j0; j <= j1; ++j) bv[j - j0] = bspline3(u - (j - 1));
    for (int j = j0; j <= j1; ++j) {
      rhs[j] += bv[j - j0] * x[i];
      for (int k = j0; k <= j; ++k)
        gram[static_cast<std::size_t>(j) * (bw + 1) + (k - j + bw)] +=
            bv[j - j0] * bv[k - j0];
    }
  }
  band_cholesky(gram, nb, bw);
  band_solve(gram, rhs, nb, bw);

  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const double u = i / h;
    const int j0 = std::max(0, static_cast<int>(std::floor(u)) - 1);
    const int j1 = std::min(nb - 1, j0 + 3);
    double trend = 0.0;
    for (int j = j0; j <= j1; ++j) trend += rhs[j] * bspline3(u - (j - 1));
    out[i] = x[i] - trend;
  }
  return out;
}

FiducialSet detect_fiducials(const WaveformRecord& rec) {
  if (rec.ppg.empty()) throw UserError("detect_fiducials: empty record");
  if (rec.fs <= 0) throw UserError("detect_fiducials: invalid sampling rate");
  FiducialSet fid;
  const int min_dist = std::max(1, static_cast<int>(0.33 * rec.fs));

  // PPG onsets: local minimum preceding each maximal-upslope point.
  {
    const auto& p = rec.ppg;
    const int n = static_cast<int>(p.size());
    std::vector<double> up(std::max(0, n - 1));
    double umax = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      up[i] = p[i + 1] - p[i];
      umax = std::max(umax, up[i]);
    }
    if (umax <= 0.0) throw UserError("detect_fiducials: no cycles found");
    const double tau = 0.25 * umax;
    std::vector<Peak> cand;
    for (int i = 1; i + 1 < n - 1; ++i)
      if (up[i] >= tau && up[i] >= up[i - 1] && up[i] > up[i + 1])
        cand.push_back({i, up[i]});
    const auto strokes = enforce_min_distance(std::move(cand), min_dist);
    if (strokes.empty()) throw UserError("detect_fiducials: no cycles found");
    std::vector<Peak> onset_cand;
    for (int s : strokes) {
      int j = s;
      while (j > 0 && p[j - 1] <= p[j]) --j;
      onset_cand.push_back({j, -p[j]});
    }
    fid.ppg_onsets = enforce_min_distance(std::move(onset_cand), min_dist);
  }

  // R-peaks: squared-derivative threshold regions, refined to the dominant
  // extremum around the median level (handles inverted QRS).
  if (rec.has_ecg()) {
    const auto& e = rec.ecg;
    const int n = static_cast<int>(e.size());
    std::vector<double> s(std::max(0, n - 1));
    for (int i = 0; i + 1 < n; ++i) {
      const double d = e[i + 1] - e[i];
      s[i] = d * d;
    }
    const int w = std::max(1, static_cast<int>(0.04 * rec.fs));
    std::vector<double> sm(s.size(), 0.0);
    double acc = 0.0;
    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
      acc += s[i];
      if (i >= w) acc -= s[i - w];
      sm[i] = acc / std::min(i + 1, w);
    }
    double smax = 0.0;
    for (double v : sm) smax = std::max(smax, v);
    if (smax <= 0.0) throw UserError("detect_fiducials: no cycles found");
    const double tau = 0.2 * smax;

    std::vector<double> sorted = e;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double med = sorted[n / 2];

    std::vector<Peak> cand;
    int i = 0;
    while (i < static_cast<int>(sm.size())) {
      if (sm[i] < tau) {
        ++i;
        continue;
      }
      int a = i;
      while (i < static_cast<int>(sm.size()) && sm[i] >= tau) ++i;
      const int lo = std::max(0, a - w), hi = std::min(n - 1, i + w);
      int best = lo;
      for (int j = lo; j <= hi; ++j)
        if (std::abs(e[j] - med) > std::abs(e[best] - med)) best = j;
      cand.push_back({best, std::abs(e[best] - med)});
    }
    if (cand.empty()) throw UserError("detect_fiducials: no cycles found");
    fid.r_peaks = enforce_min_distance(std::move(cand), min_dist);
  }
  return fid;
}

std::vector<double> resample_cycle(const std::vector<double>& x, int length) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw UserError("resample_cycle: input shorter than 2");
  if (length < 1) throw UserError("resample_cycle: length must be positive");
  std::vector<double> out(length);
  if (length == 1) {
    out[0] = x[0];
    return out;
  }
  if (n == 2) {
    for (int j = 0; j < length; ++j) {
      const double t = static_cast<double>(j) / (length - 1);
      out[j] = x[0] + t * (x[1] - x[0]);
    }
    return out;
  }
  if (n == 3) {
    // parabola through the three points
    const double c = x[0];
    const double b = (4 * x[1] - 3 * x[0] - x[2]) / 2.0;
    const double a = (x[2] + x[0] - 2 * x[1]) / 2.0;
    for (int j = 0; j < length; ++j) {
      const double t = static_cast<double>(j) * (n - 1) / (length - 1);
      out[j] = j == 0 ? x[0] : (j == length - 1 ? x[2] : c + b * t + a * t * t);
    }
    return out;
  }

  // Not-a-knot cubic spline on uniform abscissae (h = 1): solve for the
  // second derivatives M_i. Eliminating the end conditions gives
  // M_1 and M_{n-2} in closed form and a tridiagonal system in between.
  std::vector<double> m(n, 0.0);
  m[1] = x[0] - 2 * x[1] + x[2];
  m[n - 2] = x[n - 3] - 2 * x[n - 2] + x[n - 1];
  const int k = n - 4;  // unknowns M_2 .. M_{n-3}
  if (k > 0) {
    std::vector<double> diag(k, 4.0), rhs(k);
    for (int i = 0; i < k; ++i)
      rhs[i] = 6.0 * (x[i + 1] - 2 * x[i + 2] + x[i + 3]);
    rhs[0] -= m[1];
    rhs[k - 1] -= m[n - 2];
    for (int i = 1; i < k; ++i) {
      const double f = 1.0 / diag[i - 1];
      diag[i] -= f;
      rhs[i] -= f * rhs[i - 1];
    }
    m[k + 1] = rhs[k - 1] / diag[k - 1];
    for (int i = k - 2; i >= 0; --i) m[i + 2] = (rhs[i] - m[i + 3]) / diag[i];
  }
  m[0] = 2 * m[1] - m[2];
  m[n - 1] = 2 * m[n - 2] - m[n - 3];

  for (int j = 0; j < length; ++j) {
    if (j == 0) {
      out[0] = x[0];
      continue;
    }
    if (j == length - 1) {
      out[j] = x[n - 1];
      continue;
    }
    const double t = static_cast<double>(j) * (n - 1) / (length - 1);
    int i = std::min(n - 2, static_cast<int>(std::floor(t)));
    const double dt = t - i;
    const double bi = (x[i + 1] - x[i]) - (2 * m[i] + m[i + 1]) / 6.0;
    out[j] = x[i] + dt * (bi + dt * (m[i] / 2.0 + dt * (m[i + 1] - m[i]) / 6.0));
  }
  return out;
}

SegmentResult segment_and_align(const WaveformRecord& rec,
                                const FiducialSet& fid,
                                const SegmentOptions& opt) {
  if (opt.length < 16) throw UserError("segment: length must be >= 16");
  if (fid.ppg_onsets.size() < 2)
    throw UserError("segment: need at least two onsets");

  std::vector<double> ppg = rec.ppg, ecg = rec.ecg;
  if (opt.normalize) {
    auto minmax = [](std::vector<double>& v) {
      double lo = v[0], hi = v[0];
      for (double s : v) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      const double range = hi - lo;
      for (double& s : v) s = range > 0 ? (s - lo) / range : 0.5;
    };
    minmax(ppg);
    if (!ecg.empty()) minmax(ecg);
  }

  SegmentResult res;
  const auto& on = fid.ppg_onsets;
  for (std::size_t k = 0; k + 1 < on.size(); ++k) {
    const int a = on[k], b = on[k + 1];
    const double dur = (b - a) / rec.fs;
    if (dur < opt.min_duration_s || dur > opt.max_duration_s) {
      ++res.dropped_duration;
      continue;
    }
    CycleExample c;
    c.ppg = resample_cycle(
        std::vector<double>(ppg.begin() + a, ppg.begin() + b + 1), opt.length);
    c.label = rec.label;
    c.source = rec.subject_id + "#" + std::to_string(k);

    if (!ecg.empty()) {
      // match the R-peak nearest to this onset within half a cycle
      const int half = (b - a) / 2;
      int best = -1;
      for (std::size_t m = 0; m < fid.r_peaks.size(); ++m) {
        const int r = fid.r_peaks[m];
        if (std::abs(r - a) <= half &&
            (best < 0 || std::abs(r - a) < std::abs(fid.r_peaks[best] - a)))
          best = static_cast<int>(m);
      }
      if (best < 0 || best + 1 >= static_cast<int>(fid.r_peaks.size())) {
        ++res.dropped_unpaired;
        continue;
      }
      const int ra = fid.r_peaks[best], rb = fid.r_peaks[best + 1];
      if (rb >= static_cast<int>(ecg.size()) || rb - ra < 2) {
        ++res.dropped_unpaired;
        continue;
      }
      c.ecg = resample_cycle(
          std::vector<double>(ecg.begin() + ra, ecg.begin() + rb + 1),
          opt.length);
    }
    res.cycles.push_back(std::move(c));
  }
  return res;
}

}  // namespace ppgecg
