#include "embclf/inference.hpp"

#include <algorithm>
#include <cmath>

#include "embclf/error.hpp"
#include "embclf/parallel.hpp"
#include "embclf/random.hpp"

namespace embclf {

namespace {

void check_input_dim(const ProjectionHead& head, const EmbeddingStore& store) {
  if (head.input_dim() != store.dimension()) {
    throw DimensionError("heads expect hidden dimension " + std::to_string(head.input_dim()) + ", store has " +
                         std::to_string(store.dimension()));
  }
}

std::string split_name(SplitSelector s) { return s ? std::string(to_string(*s)) : "all"; }

}  // namespace

Eigen::MatrixXd hidden_matrix(const EmbeddingStore& store, SplitSelector split) {
  Eigen::MatrixXd h(store.dimension(), static_cast<Eigen::Index>(store.count(split)));
  Eigen::Index col = 0;
  for (const auto& r : store.records()) {
    if (split && r.split != *split) continue;
    for (std::size_t j = 0; j < r.hidden.size(); ++j) h(static_cast<Eigen::Index>(j), col) = r.hidden[j];
    ++col;
  }
  return h;
}

std::vector<LabeledId> labels_of(const EmbeddingStore& store, SplitSelector split) {
  std::vector<LabeledId> out;
  for (const auto& r : store.records()) {
    if (!split || r.split == *split) out.push_back({r.id, r.label});
  }
  return out;
}

std::vector<LabeledId> QuerySet::truth() const {
  std::vector<LabeledId> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = {ids[i], labels[i]};
  return out;
}

std::vector<Prediction> predict_lrc(const HeadParams& heads, const EmbeddingStore& store, SplitSelector split) {
  check_input_dim(heads.proj, store);
  if (static_cast<std::size_t>(heads.lrc.w.size()) != heads.proj.output_dim()) {
    throw DimensionError("logistic head does not match projection output");
  }
  const auto labels = labels_of(store, split);
  if (labels.empty()) return {};
  const Eigen::MatrixXd g = project_batch(heads.proj, hidden_matrix(store, split));
  std::vector<Prediction> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.push_back(Prediction::from_score(labels[i].id, lrc_forward(heads.lrc, g.col(static_cast<Eigen::Index>(i)))));
  }
  return out;
}

ProjectedDatabase project_database(const ProjectionHead& head, const EmbeddingStore& store, SplitSelector split) {
  check_input_dim(head, store);
  const auto labels = labels_of(store, split);
  if (labels.empty()) throw EmptyInputError("empty database: no records in split '" + split_name(split) + "'");
  const Eigen::MatrixXd g = project_batch(head, hidden_matrix(store, split));
  std::vector<DatabaseEntry> entries(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto col = g.col(static_cast<Eigen::Index>(i));
    entries[i] = {labels[i].id, labels[i].label, std::vector<double>(col.data(), col.data() + col.size())};
  }
  return ProjectedDatabase::build(std::move(entries));
}

QuerySet make_queries(const EmbeddingStore& store, SplitSelector split, const ProjectionHead* head) {
  QuerySet q;
  for (const auto& l : labels_of(store, split)) {
    q.ids.push_back(l.id);
    q.labels.push_back(l.label);
  }
  if (q.ids.empty()) return q;
  if (head == nullptr) {
    for (const auto& r : store.records()) {
      if (!split || r.split == *split) q.vectors.emplace_back(r.hidden.begin(), r.hidden.end());
    }
    return q;
  }
  check_input_dim(*head, store);
  const Eigen::MatrixXd g = project_batch(*head, hidden_matrix(store, split));
  for (Eigen::Index i = 0; i < g.cols(); ++i) q.vectors.emplace_back(g.col(i).data(), g.col(i).data() + g.rows());
  return q;
}

double rkc_vote(std::span<const Neighbor> neighbors) {
  double sum = 0.0;
  for (const auto& n : neighbors) sum += (n.label == 1 ? 1.0 : -1.0) * n.similarity;
  return sigmoid(sum);
}

Prediction predict_rkc(const ProjectedDatabase& db, std::uint64_t query_id, std::span<const double> query,
                       std::size_t k, bool exclude_self) {
  if (db.size() == 0) throw EmptyInputError("empty database");
  QueryFilter filter;
  if (exclude_self) filter.exclude_id = query_id;
  const auto neighbors = db.top_k(query, k, filter);
  return Prediction::from_score(query_id, rkc_vote(neighbors));
}

Prediction predict_rkc_raw(const EmbeddingStore& store_db, std::uint64_t query_id, std::span<const float> query_h,
                           std::size_t k, bool exclude_self) {
  const auto db = ProjectedDatabase::from_store(store_db);
  const std::vector<double> q(query_h.begin(), query_h.end());
  return predict_rkc(db, query_id, q, k, exclude_self);
}

std::vector<Prediction> predict_rkc_batch(const ProjectedDatabase& db, const QuerySet& queries, std::size_t k,
                                          bool exclude_self, unsigned threads) {
  if (db.size() == 0) throw EmptyInputError("empty database");
  if (k == 0) throw ValidationError("RKC: k must be positive");
  std::vector<Prediction> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = predict_rkc(db, queries.ids[i], queries.vectors[i], k, exclude_self);
    }
  });
  return out;
}

CrossDatasetReport cross_dataset_eval(const HeadParams& heads, const EmbeddingStore& source,
                                      const EmbeddingStore& target, std::size_t k, unsigned threads) {
  check_input_dim(heads.proj, source);
  check_input_dim(heads.proj, target);
  if (target.count(Split::test) == 0) throw EmptyInputError("cross-dataset: target test split is empty");
  const auto db = project_database(heads.proj, target, Split::train);
  const auto queries = make_queries(target, Split::test, &heads.proj);
  const auto truth = queries.truth();
  CrossDatasetReport report;
  report.rkc = evaluate(predict_rkc_batch(db, queries, k, false, threads), truth);
  report.lrc = evaluate(predict_lrc(heads, target, Split::test), truth);
  return report;
}

EmbeddingStore augment_db(const EmbeddingStore& db_store, const EmbeddingStore& perturbed,
                          std::optional<std::uint64_t> id_offset, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("augment: fraction must lie in [0, 1]");
  if (db_store.dimension() != perturbed.dimension()) {
    throw DimensionError("augment: database dimension " + std::to_string(db_store.dimension()) +
                         " differs from perturbed dimension " + std::to_string(perturbed.dimension()));
  }
  const std::uint64_t offset =
      id_offset.value_or(db_store.empty() ? 0 : db_store.records().back().id + 1);

  const std::size_t n = perturbed.size();
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (keep == n) return merge_stores(db_store, perturbed, offset);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  std::vector<EmbeddingRecord> chosen;
  chosen.reserve(keep);
  for (auto i : order) chosen.push_back(perturbed.records()[i]);
  const auto subset = EmbeddingStore::create(perturbed.dimension(), std::move(chosen), perturbed.provenance());
  return merge_stores(db_store, subset, offset);
}

std::vector<KSweepRow> k_sweep(const ProjectedDatabase& db, const QuerySet& queries,
                               std::span<const std::size_t> k_values, bool exclude_self, unsigned threads) {
  if (k_values.empty()) throw ValidationError("k sweep: at least one K is required");
  for (auto k : k_values) {
    if (k == 0) throw ValidationError("k sweep: every K must be positive");
  }
  if (db.size() == 0) throw EmptyInputError("empty database");
  const std::size_t k_max = *std::max_element(k_values.begin(), k_values.end());

  // Neighbors come back sorted, so top-K for any K <= k_max is a prefix.
  std::vector<std::vector<Neighbor>> retrieved(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      QueryFilter filter;
      if (exclude_self) filter.exclude_id = queries.ids[i];
      retrieved[i] = db.top_k(queries.vectors[i], k_max, filter);
    }
  });

  const auto truth = queries.truth();
  std::vector<KSweepRow> rows;
  for (auto k : k_values) {
    std::vector<Prediction> preds(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto& nb = retrieved[i];
      const std::size_t m = std::min(k, nb.size());
      preds[i] = Prediction::from_score(queries.ids[i], rkc_vote(std::span<const Neighbor>(nb.data(), m)));
    }
    rows.push_back({k, evaluate(preds, truth)});
  }
  return rows;
}

}  // namespace embclf
