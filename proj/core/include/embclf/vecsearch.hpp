#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "embclf/store.hpp"

namespace embclf {

struct Neighbor {
  std::uint64_t id = 0;
  std::uint8_t label = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct DatabaseEntry {
  std::uint64_t id = 0;
  std::uint8_t label = 0;
  std::vector<double> vector;
};

struct QueryFilter {
  std::optional<std::uint64_t> exclude_id;
  std::optional<std::uint8_t> label;
};

struct MinedPair {
  Neighbor positive;
  Neighbor negative;
};

// Dot product with a fixed eight-lane accumulation order. Every similarity
// in this module goes through it, so single-query and batched paths agree
// bit for bit.
double dot(std::span<const double> a, std::span<const double> b);

// Immutable snapshot of labeled vectors searched by exact cosine
// similarity. Entries are L2-normalized at build time and kept in ascending
// id order; ties in similarity are broken by ascending id.
class ProjectedDatabase {
 public:
  ProjectedDatabase() = default;

  // Throws EmptyInputError when `entries` is empty, DimensionError on
  // inconsistent lengths, ValidationError on non-finite values, a zero-norm
  // vector, a label outside {0,1} or a duplicate id.
  static ProjectedDatabase build(std::vector<DatabaseEntry> entries);

  // Database over the raw hidden vectors of `store` restricted to `split`.
  static ProjectedDatabase from_store(const EmbeddingStore& store, SplitSelector split = std::nullopt);

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return dim_; }
  std::uint64_t id(std::size_t i) const { return ids_[i]; }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }
  // Unit-norm copy of entry i and the norm it had before normalization.
  std::span<const double> unit_vector(std::size_t i) const { return {unit_.data() + i * dim_, dim_}; }
  double norm(std::size_t i) const { return norms_[i]; }
  std::optional<std::size_t> find(std::uint64_t id) const;
  std::size_t count_label(std::uint8_t label) const;

  // Top-k eligible entries by cosine similarity to `query`, descending, ties
  // by ascending id. Returns min(k, #eligible) neighbors. Throws on k == 0,
  // a zero-norm or non-finite query, or a dimension mismatch.
  std::vector<Neighbor> top_k(std::span<const double> query, std::size_t k, const QueryFilter& filter = {}) const;

  // Cosine similarity of `query` to every entry, in entry order.
  std::vector<double> similarities(std::span<const double> query) const;

  // Validated unit-norm copy of `query`.
  std::vector<double> unit_query(std::span<const double> query) const;

 private:

  std::size_t dim_ = 0;
  std::vector<std::uint64_t> ids_;
  std::vector<std::uint8_t> labels_;
  std::vector<double> unit_;
  std::vector<double> norms_;
};

// Most similar same-label entry other than `query_id` (pseudo-gold
// positive) and most similar opposite-label entry (hard negative). The
// query's label is looked up by id in the database. Throws MiningError if
// `query_id` is absent or either role has no candidate.
MinedPair mine_contrastive(const ProjectedDatabase& db, std::uint64_t query_id, std::span<const double> query);

// mine_contrastive for many queries at once. `queries` holds
// query_ids.size() row vectors of db.dimension() contiguous doubles. The
// result is identical to calling mine_contrastive per query, for any
// thread count.
std::vector<MinedPair> mine_contrastive_batch(const ProjectedDatabase& db, std::span<const std::uint64_t> query_ids,
                                              std::span<const double> queries, unsigned threads = 1);

}  // namespace embclf
