#include "embclf/trainer.hpp"

#include <cstdio>
#include <numeric>

#include "embclf/error.hpp"
#include "embclf/inference.hpp"
#include "embclf/random.hpp"

namespace embclf {

void TrainConfig::validate() const {
  if (hidden_dim == 0 || projection_dim == 0) throw ValidationError("head dimensions must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (max_epochs < 1) throw ValidationError("max epochs must be >= 1");
  if (!(grad_clip > 0)) throw ValidationError("gradient clip value must be positive");
  if (positives_per_example != 1 || negatives_per_example != 1) {
    throw ValidationError("exactly one positive and one negative per example are supported");
  }
  const auto& o = optimizer;
  if (!(o.learning_rate > 0)) throw ValidationError("learning rate must be positive");
  if (!(o.weight_decay >= 0)) throw ValidationError("weight decay must be non-negative");
  if (!(o.beta1 >= 0 && o.beta1 < 1) || !(o.beta2 >= 0 && o.beta2 < 1)) {
    throw ValidationError("optimizer betas must lie in [0, 1)");
  }
  if (!(o.epsilon > 0)) throw ValidationError("optimizer epsilon must be positive");
  if (flags.disable_cl && flags.disable_lr) {
    throw EmptyInputError("empty objective: both the contrastive and the logistic loss are disabled");
  }
}

namespace {

// Seeds for independent streams derived from the run seed.
constexpr std::uint64_t kShuffleStream = 0x9E3779B97F4A7C15ull;

void fill_column(Eigen::MatrixXd& m, Eigen::Index col, const std::vector<float>& h) {
  for (std::size_t j = 0; j < h.size(); ++j) m(static_cast<Eigen::Index>(j), col) = h[j];
}

bool better(const std::optional<double>& candidate, const std::optional<double>& incumbent) {
  if (!candidate) return false;
  if (!incumbent) return true;
  return *candidate > *incumbent;
}

}  // namespace

TrainRun train_stage2(const EmbeddingStore& store, const TrainConfig& config, TrainObserver* observer) {
  config.validate();
  const auto train = store.subset(Split::train);
  if (train.empty()) throw EmptyInputError("train split is empty");
  if (store.count(Split::val) == 0) throw EmptyInputError("val split is empty");
  const bool use_cl = !config.flags.disable_cl;
  if (use_cl) {
    std::size_t positives = 0;
    for (const auto& r : train.records()) positives += r.label;
    if (positives == 0 || positives == train.size()) {
      throw MiningError(std::string("unsatisfiable mining: train split has no examples with label ") +
                        (positives == 0 ? "1" : "0"));
    }
  }

  const std::size_t n = train.size();
  const auto records = train.records();
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = records[i].id;

  TrainRun run;
  run.config = config;
  HeadParams params =
      HeadParams::random_init(store.dimension(), config.hidden_dim, config.projection_dim, config.seed);
  OptimState optim = OptimState::init(params, config.optimizer);
  Rng shuffle_rng(config.seed ^ kShuffleStream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::optional<double> best_auroc;
  std::vector<std::size_t> positive_of(n), negative_of(n);

  for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (use_cl) {
      // The database and every query come from the epoch-start heads, so the
      // whole epoch's mining is fixed here.
      const auto db = project_database(params.proj, train, std::nullopt);
      if (observer) observer->on_epoch_start(epoch, params, db);
      std::vector<double> queries(n * db.dimension());
      for (std::size_t i = 0; i < n; ++i) {
        const auto u = db.unit_vector(i);
        std::copy(u.begin(), u.end(), queries.begin() + static_cast<std::ptrdiff_t>(i * db.dimension()));
      }
      const auto pairs = mine_contrastive_batch(db, ids, queries, config.threads);
      if (observer) observer->on_mined(epoch, db, pairs);
      for (std::size_t i = 0; i < n; ++i) {
        positive_of[i] = *db.find(pairs[i].positive.id);
        negative_of[i] = *db.find(pairs[i].negative.id);
      }
    }

    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double sum_cl = 0.0, sum_lr = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min<std::size_t>(config.batch_size, n - start);
      const auto d = static_cast<Eigen::Index>(store.dimension());
      const auto cols = static_cast<Eigen::Index>(len);
      Stage2Batch batch;
      batch.h.resize(d, cols);
      if (use_cl) {
        batch.h_pos.resize(d, cols);
        batch.h_neg.resize(d, cols);
      }
      batch.labels.resize(len);
      for (std::size_t b = 0; b < len; ++b) {
        const std::size_t i = order[start + b];
        const auto col = static_cast<Eigen::Index>(b);
        fill_column(batch.h, col, records[i].hidden);
        batch.labels[b] = records[i].label;
        if (use_cl) {
          fill_column(batch.h_pos, col, records[positive_of[i]].hidden);
          fill_column(batch.h_neg, col, records[negative_of[i]].hidden);
        }
      }
      auto result = stage2_grads(params, batch, config.flags);
      sum_cl += result.loss_cl * static_cast<double>(len);
      sum_lr += result.loss_lr * static_cast<double>(len);
      optim_step(params, std::move(result.grads), optim, config.grad_clip);
    }

    Checkpoint snapshot{params, optim};
    round_to_float(snapshot.heads);
    const auto val_report = evaluate(predict_lrc(snapshot.heads, store, Split::val), labels_of(store, Split::val));
    EpochStats stats;
    stats.epoch = epoch;
    stats.loss_cl = sum_cl / static_cast<double>(n);
    stats.loss_lr = sum_lr / static_cast<double>(n);
    stats.val_auroc = val_report.auroc;
    stats.val_accuracy = val_report.accuracy;
    run.history.push_back(stats);
    if (observer) observer->on_epoch_end(stats);

    if (run.best_epoch == 0 || better(stats.val_auroc, best_auroc)) {
      best_auroc = stats.val_auroc;
      run.best_epoch = epoch;
      run.best = snapshot;
    }
    if (epoch == config.max_epochs) run.last = std::move(snapshot);
  }
  return run;
}

std::string format_history_csv(std::span<const EpochStats> history) {
  std::string out = "epoch,loss_cl,loss_lr,val_auroc,val_acc\n";
  char buf[160];
  for (const auto& e : history) {
    char auc[32];
    if (e.val_auroc) std::snprintf(auc, sizeof auc, "%.17g", *e.val_auroc);
    else std::snprintf(auc, sizeof auc, "undefined");
    std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%s,%.17g\n", e.epoch, e.loss_cl, e.loss_lr, auc, e.val_accuracy);
    out += buf;
  }
  return out;
}

std::vector<AblationRow> ablate(const EmbeddingStore& store, const TrainConfig& config, std::size_t rkc_k) {
  struct Variant {
    const char* name;
    bool disable_cl;
    bool disable_lr;
  };
  const Variant variants[] = {{"full", false, false}, {"w/o L_CL", true, false}, {"w/o L_LR", false, true}};
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    TrainConfig c = config;
    c.flags.disable_cl = v.disable_cl;
    c.flags.disable_lr = v.disable_lr;
    AblationRow row;
    row.name = v.name;
    row.run = train_stage2(store, c);
    const auto& heads = row.run.best.heads;
    row.val_lrc = evaluate(predict_lrc(heads, store, Split::val), labels_of(store, Split::val));
    row.test_lrc = evaluate(predict_lrc(heads, store, Split::test), labels_of(store, Split::test));
    if (store.count(Split::test) > 0) {
      const auto db = project_database(heads.proj, store, Split::train);
      const auto queries = make_queries(store, Split::test, &heads.proj);
      row.test_rkc = evaluate(predict_rkc_batch(db, queries, rkc_k, false, config.threads), queries.truth());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace embclf
