#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embclf/checkpoint.hpp"
#include "embclf/heads.hpp"
#include "embclf/metrics.hpp"
#include "embclf/optim.hpp"
#include "embclf/store.hpp"
#include "embclf/vecsearch.hpp"

namespace embclf {

struct TrainConfig {
  std::uint32_t hidden_dim = kDefaultHiddenDim;
  std::uint32_t projection_dim = kDefaultProjectionDim;
  std::uint32_t batch_size = 64;
  std::uint32_t max_epochs = 30;
  double grad_clip = 0.1;
  // The loss takes exactly one positive and one negative per example.
  std::uint32_t positives_per_example = 1;
  std::uint32_t negatives_per_example = 1;
  AdamWConfig optimizer;
  LossFlags flags;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // Throws ValidationError for out-of-range values.
  void validate() const;
};

struct EpochStats {
  std::uint32_t epoch = 0;  // 1-based
  double loss_cl = 0.0;     // per-example mean over the epoch
  double loss_lr = 0.0;
  std::optional<double> val_auroc;
  double val_accuracy = 0.0;
};

struct TrainRun {
  TrainConfig config;
  std::vector<EpochStats> history;
  // Snapshot with the highest validation AUROC (earliest on ties), already
  // rounded to checkpoint precision so it re-evaluates exactly.
  Checkpoint best;
  std::uint32_t best_epoch = 0;
  Checkpoint last;
};

// Hooks for tests and progress reporting. Defaults do nothing.
class TrainObserver {
 public:
  virtual ~TrainObserver() = default;
  // After the epoch's database has been rebuilt from the current heads.
  virtual void on_epoch_start(std::uint32_t /*epoch*/, const HeadParams& /*params*/,
                              const ProjectedDatabase& /*db*/) {}
  // Mining results for the whole train split, in database order.
  virtual void on_mined(std::uint32_t /*epoch*/, const ProjectedDatabase& /*db*/,
                        std::span<const MinedPair> /*pairs*/) {}
  virtual void on_epoch_end(const EpochStats& /*stats*/) {}
};

// Stage-2 training of the projection and logistic heads on frozen hidden
// vectors. Per epoch: project the train split into a fresh database, mine
// one pseudo-gold positive and one hard negative per train example from it,
// run shuffled mini-batches of stage2_grads + optim_step, then score the
// logistic head on the val split. Runs exactly max_epochs epochs.
//
// Throws EmptyInputError if both losses are disabled or the train/val
// split is empty, MiningError if the contrastive term is enabled and the
// train split lacks a class.
TrainRun train_stage2(const EmbeddingStore& store, const TrainConfig& config, TrainObserver* observer = nullptr);

// "epoch,loss_cl,loss_lr,val_auroc,val_acc" plus one row per epoch.
std::string format_history_csv(std::span<const EpochStats> history);

struct AblationRow {
  std::string name;
  TrainRun run;
  MetricReport val_lrc;
  MetricReport test_lrc;
  MetricReport test_rkc;
};

// Three runs with identical seed and config except the loss flags: full
// objective, without the contrastive term, without the logistic term. Test
// metrics come from each run's best checkpoint; RKC uses the train split as
// database and `rkc_k` neighbors.
std::vector<AblationRow> ablate(const EmbeddingStore& store, const TrainConfig& config,
                                std::size_t rkc_k = 20);

}  // namespace embclf
