#include "ppgecg/record.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppgecg/error.hpp"

namespace ppgecg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    out.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, std::size_t row, const char* col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UserError("csv: row " + std::to_string(row) + ": cannot parse '" +
                    s + "' in column " + col);
  }
}

}  // namespace

WaveformRecord load_record(const std::string& path, FiducialSet* fid) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw UserError("empty csv: " + path);
  const auto header = split_csv_line(line);

  int c_t = -1, c_ppg = -1, c_ecg = -1, c_onset = -1, c_rpeak = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") c_t = static_cast<int>(i);
    else if (header[i] == "ppg") c_ppg = static_cast<int>(i);
    else if (header[i] == "ecg") c_ecg = static_cast<int>(i);
    else if (header[i] == "onset") c_onset = static_cast<int>(i);
    else if (header[i] == "rpeak") c_rpeak = static_cast<int>(i);
    else throw UserError("csv: unknown column '" + header[i] + "'");
  }
  if (c_t < 0) throw UserError("csv: missing required column 't'");
  if (c_ppg < 0) throw UserError("csv: missing required column 'ppg'");

  WaveformRecord rec;
  rec.subject_id = path;
  std::vector<double> ts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw UserError("csv: row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    const double t = parse_double(f[c_t], row, "t");
    const double p = parse_double(f[c_ppg], row, "ppg");
    if (!std::isfinite(t) || !std::isfinite(p))
      throw UserError("csv: row " + std::to_string(row) +
                      ": non-finite sample");
    if (!ts.empty() && t <= ts.back())
      throw UserError("csv: row " + std::to_string(row) +
                      ": time column not strictly increasing");
    ts.push_back(t);
    rec.ppg.push_back(p);
    if (c_ecg >= 0) {
      const double e = parse_double(f[c_ecg], row, "ecg");
      if (!std::isfinite(e))
        throw UserError("csv: row " + std::to_string(row) +
                        ": non-finite sample");
      rec.ecg.push_back(e);
    }
    if (fid && c_onset >= 0 && parse_double(f[c_onset], row, "onset") != 0.0)
      fid->ppg_onsets.push_back(static_cast<int>(ts.size()) - 1);
    if (fid && c_rpeak >= 0 && parse_double(f[c_rpeak], row, "rpeak") != 0.0)
      fid->r_peaks.push_back(static_cast<int>(ts.size()) - 1);
  }
  if (ts.size() < 2) throw UserError("csv: need at least 2 rows: " + path);
  rec.fs = (ts.size() - 1) / (ts.back() - ts.front());
  return rec;
}

void write_record_csv(const std::string& path, const WaveformRecord& rec,
                      const FiducialSet* fid) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write file: " + path);
  out << "t,ppg";
  if (rec.has_ecg()) out << ",ecg";
  if (fid) out << ",onset,rpeak";
  out << "\n";
  std::vector<char> is_onset(rec.ppg.size(), 0), is_rpeak(rec.ppg.size(), 0);
  if (fid) {
    for (int i : fid->ppg_onsets) is_onset[static_cast<std::size_t>(i)] = 1;
    for (int i : fid->r_peaks) is_rpeak[static_cast<std::size_t>(i)] = 1;
  }
  char buf[64];
  for (std::size_t i = 0; i < rec.ppg.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(i) / rec.fs);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", rec.ppg[i]);
    out << buf;
    if (rec.has_ecg()) {
      std::snprintf(buf, sizeof buf, "%.17g", rec.ecg[i]);
      out << "," << buf;
    }
    if (fid) out << "," << int(is_onset[i]) << "," << int(is_rpeak[i]);
    out << "\n";
  }
}

std::vector<CycleExample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open file: " + path);
  std::vector<CycleExample> cycles;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw UserError("dataset: line " + std::to_string(row) + ": " + e.what());
    }
    CycleExample c;
    c.ppg = j.at("ppg").get<std::vector<double>>();
    if (j.contains("ecg") && !j["ecg"].is_null())
      c.ecg = j["ecg"].get<std::vector<double>>();
    if (j.contains("label") && !j["label"].is_null())
      c.label = j["label"].get<int>();
    if (j.contains("source")) c.source = j["source"].get<std::string>();
    for (double v : c.ppg)
      if (!std::isfinite(v))
        throw UserError("dataset: line " + std::to_string(row) +
                        ": non-finite ppg");
    if (c.ecg)
      for (double v : *c.ecg)
        if (!std::isfinite(v))
          throw UserError("dataset: line " + std::to_string(row) +
                          ": non-finite ecg");
    cycles.push_back(std::move(c));
  }
  return cycles;
}

void save_dataset(const std::string& path,
                  const std::vector<CycleExample>& cycles) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write file: " + path);
  for (const auto& c : cycles) {
    ordered_json j;
    j["ppg"] = c.ppg;
    j["ecg"] = c.ecg ? ordered_json(*c.ecg) : ordered_json(nullptr);
    j["label"] = c.label ? ordered_json(*c.label) : ordered_json(nullptr);
    j["source"] = c.source;
    out << j.dump() << "\n";
  }
}

}  // namespace ppgecg
