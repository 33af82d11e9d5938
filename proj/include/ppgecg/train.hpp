#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppgecg/adam.hpp"
#include "ppgecg/losses.hpp"
#include "ppgecg/model.hpp"
#include "ppgecg/record.hpp"

namespace ppgecg::train {

struct TrainConfig {
  int epochs = 40;
  int batch_size = 10;
  double lr_initial = 5e-4;
  double lr_after = 1e-4;
  int lr_decay_epoch = 20;  // epochs after this one use lr_after
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lambda_d = 0.1;
  double lambda_s = 5e-6;
  double lambda_c = 1.0;  // cycle-consistency weight
  std::uint64_t seed = 1;
  std::string log_path;  // JSON-lines training log, empty = no log

  AdamConfig adam() const { return {beta1, beta2, eps}; }
  LossWeights weights() const { return {lambda_d, lambda_s}; }
  double lr_at(int epoch) const {
    return epoch <= lr_decay_epoch ? lr_initial : lr_after;
  }
};

struct EpochStats {
  int epoch = 0;
  double loss_total = 0.0;
  double loss_rec = 0.0;
  double loss_ce = 0.0;
  double loss_sparse = 0.0;
  std::optional<double> loss_cycle;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  std::vector<double> batch_losses;  // per-batch mean totals, in order
};

// Deterministic mini-batch supervised training of the PPG-to-ECG model on
// paired cycles (examples without a label contribute no CE term).
TrainResult train_supervised(net::ModelParams& model,
                             const std::vector<CycleExample>& data,
                             const TrainConfig& cfg);

struct SemiResult {
  TrainResult log;  // per-epoch means over both paired and unpaired batches
};

// Semi-supervised training of the two mappings. Paired batches apply the
// joint loss in both directions; unpaired batches apply the two cycle
// consistency losses weighted by lambda_c, alternating with paired batches.
// With both unpaired pools empty this degenerates to supervised training of
// each direction (a warning is printed).
SemiResult train_semisupervised(net::ModelParams& p2e, net::ModelParams& e2p,
                                const std::vector<CycleExample>& paired,
                                const std::vector<CycleExample>& unpaired_ppg,
                                const std::vector<CycleExample>& unpaired_ecg,
                                const TrainConfig& cfg);

void write_log_line(const std::string& path, const EpochStats& s);

}  // namespace ppgecg::train
