#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ppgecg {

// Raw synchronized streams as ingested from disk.
struct WaveformRecord {
  std::vector<double> ppg;
  std::vector<double> ecg;  // empty when the record is PPG-only
  double fs = 125.0;
  std::optional<int> label;
  std::string subject_id;

  bool has_ecg() const { return !ecg.empty(); }
};

// One aligned, fixed-length cycle. ppg starts at a PPG onset; ecg, when
// present, starts at the matched R-peak.
struct CycleExample {
  std::vector<double> ppg;
  std::optional<std::vector<double>> ecg;
  std::optional<int> label;
  std::string source;
};

struct FiducialSet {
  std::vector<int> ppg_onsets;
  std::vector<int> r_peaks;
};

// CSV with header `t,ppg[,ecg][,onset][,rpeak]`; `t` in seconds, strictly
// increasing. Marker columns, when present, carry precomputed fiducials and
// are returned through `fid`.
WaveformRecord load_record(const std::string& path,
                           FiducialSet* fid = nullptr);

void write_record_csv(const std::string& path, const WaveformRecord& rec,
                      const FiducialSet* fid = nullptr);

// JSON-lines cycle dataset:
// {"ppg":[...],"ecg":[...]|null,"label":int|null,"source":"..."}
std::vector<CycleExample> load_dataset(const std::string& path);
void save_dataset(const std::string& path,
                  const std::vector<CycleExample>& cycles);

}  // namespace ppgecg
