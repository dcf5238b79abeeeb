#include "embclf/vecsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "embclf/error.hpp"
#include "embclf/parallel.hpp"

namespace embclf {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* x = a.data();
  const double* y = b.data();
  double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int j = 0; j < 8; ++j) acc[j] += x[i + j] * y[i + j];
  }
  for (int j = 0; i < n; ++i, ++j) acc[j] += x[i] * y[i];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
}

namespace {

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

// Running best candidate for one role; entries arrive in ascending id order,
// so keeping the first of equal similarities implements the id tie-break.
struct Best {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  double similarity = -std::numeric_limits<double>::infinity();
  bool found() const { return index != std::numeric_limits<std::size_t>::max(); }
  void offer(std::size_t i, double s) {
    if (!found() || s > similarity) {
      index = i;
      similarity = s;
    }
  }
};

Neighbor to_neighbor(const ProjectedDatabase& db, const Best& b) {
  return Neighbor{db.id(b.index), db.label(b.index), b.similarity};
}

}  // namespace

ProjectedDatabase ProjectedDatabase::build(std::vector<DatabaseEntry> entries) {
  if (entries.empty()) throw EmptyInputError("cannot build a database from zero vectors");
  const std::size_t dim = entries.front().vector.size();
  if (dim == 0) throw DimensionError("database vectors must have positive dimension");
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  ProjectedDatabase db;
  db.dim_ = dim;
  db.ids_.reserve(entries.size());
  db.labels_.reserve(entries.size());
  db.norms_.reserve(entries.size());
  db.unit_.resize(entries.size() * dim);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string who = "database entry id " + std::to_string(e.id);
    if (i > 0 && e.id == entries[i - 1].id) throw ValidationError("duplicate " + who);
    if (e.vector.size() != dim) {
      throw DimensionError(who + " has dimension " + std::to_string(e.vector.size()) + ", expected " +
                           std::to_string(dim));
    }
    if (e.label > 1) throw ValidationError(who + ": label must be 0 or 1");
    for (double v : e.vector) {
      if (!std::isfinite(v)) throw ValidationError(who + ": non-finite value");
    }
    const double norm = std::sqrt(dot(e.vector, e.vector));
    if (!(norm > 0)) throw ValidationError(who + ": zero-norm vector");
    double* out = db.unit_.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) out[j] = e.vector[j] / norm;
    db.ids_.push_back(e.id);
    db.labels_.push_back(e.label);
    db.norms_.push_back(norm);
  }
  return db;
}

ProjectedDatabase ProjectedDatabase::from_store(const EmbeddingStore& store, SplitSelector split) {
  std::vector<DatabaseEntry> entries;
  for (const auto& r : store.records()) {
    if (split && r.split != *split) continue;
    entries.push_back({r.id, r.label, std::vector<double>(r.hidden.begin(), r.hidden.end())});
  }
  if (entries.empty()) {
    throw EmptyInputError("empty database: no records in split '" +
                          std::string(split ? to_string(*split) : "all") + "'");
  }
  return build(std::move(entries));
}

std::optional<std::size_t> ProjectedDatabase::find(std::uint64_t id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t ProjectedDatabase::count_label(std::uint8_t label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::vector<double> ProjectedDatabase::unit_query(std::span<const double> query) const {
  if (query.size() != dim_) {
    throw DimensionError("query has dimension " + std::to_string(query.size()) + ", database has " +
                         std::to_string(dim_));
  }
  for (double v : query) {
    if (!std::isfinite(v)) throw ValidationError("query contains a non-finite value");
  }
  const double norm = std::sqrt(dot(query, query));
  if (!(norm > 0)) throw ValidationError("zero-norm query");
  std::vector<double> q(query.begin(), query.end());
  for (double& v : q) v /= norm;
  return q;
}

std::vector<double> ProjectedDatabase::similarities(std::span<const double> query) const {
  const auto q = unit_query(query);
  std::vector<double> sims(size());
  for (std::size_t i = 0; i < size(); ++i) sims[i] = dot(q, unit_vector(i));
  return sims;
}

std::vector<Neighbor> ProjectedDatabase::top_k(std::span<const double> query, std::size_t k,
                                               const QueryFilter& filter) const {
  if (k == 0) throw ValidationError("top_k: k must be positive");
  const auto q = unit_query(query);
  std::vector<Neighbor> candidates;
  candidates.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (filter.exclude_id && ids_[i] == *filter.exclude_id) continue;
    if (filter.label && labels_[i] != *filter.label) continue;
    candidates.push_back({ids_[i], labels_[i], dot(q, unit_vector(i))});
  }
  const std::size_t m = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(m), candidates.end(),
                    ranks_before);
  candidates.resize(m);
  return candidates;
}

namespace {

std::uint8_t query_label(const ProjectedDatabase& db, std::uint64_t query_id) {
  const auto idx = db.find(query_id);
  if (!idx) throw MiningError("query id " + std::to_string(query_id) + " is not in the database");
  return db.label(*idx);
}

MinedPair finish(const ProjectedDatabase& db, std::uint64_t query_id, std::uint8_t label, const Best& pos,
                 const Best& neg) {
  if (!pos.found()) {
    throw MiningError("unsatisfiable mining for id " + std::to_string(query_id) + ": no other entry with label " +
                      std::to_string(label) + " (pseudo-gold positive class missing)");
  }
  if (!neg.found()) {
    throw MiningError("unsatisfiable mining for id " + std::to_string(query_id) + ": no entry with label " +
                      std::to_string(1 - label) + " (hard-negative class missing)");
  }
  return {to_neighbor(db, pos), to_neighbor(db, neg)};
}

}  // namespace

MinedPair mine_contrastive(const ProjectedDatabase& db, std::uint64_t query_id, std::span<const double> query) {
  const std::uint8_t label = query_label(db, query_id);
  const auto sims = db.similarities(query);
  Best pos, neg;
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (db.label(i) == label) {
      if (db.id(i) != query_id) pos.offer(i, sims[i]);
    } else {
      neg.offer(i, sims[i]);
    }
  }
  return finish(db, query_id, label, pos, neg);
}

std::vector<MinedPair> mine_contrastive_batch(const ProjectedDatabase& db, std::span<const std::uint64_t> query_ids,
                                              std::span<const double> queries, unsigned threads) {
  const std::size_t n = query_ids.size();
  const std::size_t dim = db.dimension();
  if (queries.size() != n * dim) {
    throw DimensionError("query block has " + std::to_string(queries.size()) + " values, expected " +
                         std::to_string(n) + " x " + std::to_string(dim));
  }
  std::vector<MinedPair> out(n);
  constexpr std::size_t kTile = 16;
  const std::size_t tiles = (n + kTile - 1) / kTile;

  parallel_for(tiles, threads, [&](std::size_t t_begin, std::size_t t_end) {
    for (std::size_t t = t_begin; t < t_end; ++t) {
      const std::size_t q0 = t * kTile;
      const std::size_t q1 = std::min(n, q0 + kTile);
      std::vector<std::vector<double>> unit;
      std::vector<std::uint8_t> labels;
      for (std::size_t q = q0; q < q1; ++q) {
        unit.push_back(db.unit_query(queries.subspan(q * dim, dim)));
        labels.push_back(query_label(db, query_ids[q]));
      }
      std::vector<Best> pos(q1 - q0), neg(q1 - q0);
      for (std::size_t i = 0; i < db.size(); ++i) {
        const auto entry = db.unit_vector(i);
        const auto entry_label = db.label(i);
        const auto entry_id = db.id(i);
        for (std::size_t q = 0; q < q1 - q0; ++q) {
          const double s = dot(unit[q], entry);
          if (entry_label == labels[q]) {
            if (entry_id != query_ids[q0 + q]) pos[q].offer(i, s);
          } else {
            neg[q].offer(i, s);
          }
        }
      }
      for (std::size_t q = 0; q < q1 - q0; ++q) out[q0 + q] = finish(db, query_ids[q0 + q], labels[q], pos[q], neg[q]);
    }
  });
  return out;
}

}  // namespace embclf
