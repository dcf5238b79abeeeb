#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "embclf/heads.hpp"
#include "embclf/metrics.hpp"
#include "embclf/store.hpp"
#include "embclf/vecsearch.hpp"

namespace embclf {

inline constexpr std::size_t kDefaultRkcK = 20;

// Hidden vectors of the selected records as columns of a d x n matrix, in
// store (ascending id) order.
Eigen::MatrixXd hidden_matrix(const EmbeddingStore& store, SplitSelector split);

std::vector<LabeledId> labels_of(const EmbeddingStore& store, SplitSelector split);

// One prediction per selected record, in id order, scored by
// lrc_forward(project(h)). Throws DimensionError if the store and head
// disagree.
std::vector<Prediction> predict_lrc(const HeadParams& heads, const EmbeddingStore& store, SplitSelector split);

// Database of projected hidden vectors of the selected records. Throws
// EmptyInputError when the selection is empty.
ProjectedDatabase project_database(const ProjectionHead& head, const EmbeddingStore& store, SplitSelector split);

// Query vectors (projected or raw) with their ids and labels.
struct QuerySet {
  std::vector<std::uint64_t> ids;
  std::vector<std::uint8_t> labels;
  std::vector<std::vector<double>> vectors;

  std::size_t size() const { return ids.size(); }
  std::vector<LabeledId> truth() const;
};

// `head == nullptr` keeps the raw hidden vectors.
QuerySet make_queries(const EmbeddingStore& store, SplitSelector split, const ProjectionHead* head);

// sigmoid(sum_k ybar_k * sim_k) with ybar = +1 for label 1 and -1 for
// label 0. No normalization by K, so large K saturates toward 0 or 1.
double rkc_vote(std::span<const Neighbor> neighbors);

// Retrieval-augmented KNN score of one query: top-k neighbors (all entries
// if fewer than k) without label filter. `exclude_self` drops the entry
// whose id equals query_id. Throws on k == 0 or a zero-norm query.
Prediction predict_rkc(const ProjectedDatabase& db, std::uint64_t query_id, std::span<const double> query,
                       std::size_t k = kDefaultRkcK, bool exclude_self = false);

// predict_rkc over a database built from the raw hidden vectors of every
// record in `store_db`.
Prediction predict_rkc_raw(const EmbeddingStore& store_db, std::uint64_t query_id, std::span<const float> query_h,
                           std::size_t k = kDefaultRkcK, bool exclude_self = false);

// predict_rkc for every query, optionally across threads; output order
// follows `queries`.
std::vector<Prediction> predict_rkc_batch(const ProjectedDatabase& db, const QuerySet& queries, std::size_t k,
                                          bool exclude_self = false, unsigned threads = 1);

struct CrossDatasetReport {
  MetricReport rkc;
  MetricReport lrc;
};

// Source-trained heads applied to a target corpus: the RKC database is the
// target's train split projected by the source head; both RKC and LRC are
// scored on the target's test split. Throws DimensionError when the heads
// do not accept the target dimension and EmptyInputError when the target
// train or test split is empty.
CrossDatasetReport cross_dataset_eval(const HeadParams& heads, const EmbeddingStore& source,
                                      const EmbeddingStore& target, std::size_t k = kDefaultRkcK,
                                      unsigned threads = 1);

// Retrieval database extended with perturbed copies. A `fraction` of the
// perturbed records (chosen by a seeded shuffle) is merged with ids shifted
// by `id_offset`, or by max(base id) + 1 when nullopt.
EmbeddingStore augment_db(const EmbeddingStore& db_store, const EmbeddingStore& perturbed,
                          std::optional<std::uint64_t> id_offset = std::nullopt, double fraction = 1.0,
                          std::uint64_t seed = 0);

struct KSweepRow {
  std::size_t k = 0;
  MetricReport report;
};

// One metric report per entry of k_values (duplicates kept), all from a
// single retrieval of max(k_values) neighbors per query.
std::vector<KSweepRow> k_sweep(const ProjectedDatabase& db, const QuerySet& queries,
                               std::span<const std::size_t> k_values, bool exclude_self = false,
                               unsigned threads = 1);

}  // namespace embclf
