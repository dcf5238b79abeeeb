#include "embclf/synth.hpp"

#include <cmath>

#include "embclf/error.hpp"
#include "embclf/random.hpp"

namespace embclf {

namespace {

void validate(const SynthSpec& spec) {
  if (spec.dimension == 0) throw ValidationError("synth: dimension must be positive");
  if (spec.clusters.empty()) throw ValidationError("synth: at least one cluster is required");
  const auto& f = spec.splits;
  if (f.train < 0 || f.val < 0 || f.test < 0) throw ValidationError("synth: split fractions must be non-negative");
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw ValidationError("synth: split fractions must sum to 1 (got " + std::to_string(f.train + f.val + f.test) +
                          ")");
  }
  for (std::size_t c = 0; c < spec.clusters.size(); ++c) {
    const auto& cl = spec.clusters[c];
    const std::string where = "synth: cluster " + std::to_string(c);
    if (!(cl.stddev > 0) || !std::isfinite(cl.stddev)) throw ValidationError(where + ": stddev must be positive");
    if (cl.count == 0) throw ValidationError(where + ": count must be positive");
    if (cl.label > 1) throw ValidationError(where + ": label must be 0 or 1");
    if (cl.mean.size() != spec.dimension) {
      throw ValidationError(where + ": mean has " + std::to_string(cl.mean.size()) + " entries, dimension is " +
                            std::to_string(spec.dimension));
    }
  }
}

}  // namespace

EmbeddingStore synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  std::vector<EmbeddingRecord> records;
  std::uint64_t next_id = 0;
  for (const auto& cl : spec.clusters) {
    const auto n = cl.count;
    auto n_train = static_cast<std::uint64_t>(std::llround(spec.splits.train * static_cast<double>(n)));
    auto n_val = static_cast<std::uint64_t>(std::llround(spec.splits.val * static_cast<double>(n)));
    if (n_train > n) n_train = n;
    if (n_val > n - n_train) n_val = n - n_train;
    std::vector<Split> splits(n, Split::test);
    std::fill_n(splits.begin(), n_train, Split::train);
    std::fill_n(splits.begin() + static_cast<std::ptrdiff_t>(n_train), n_val, Split::val);
    rng.shuffle(std::span<Split>(splits));

    for (std::uint64_t i = 0; i < n; ++i) {
      EmbeddingRecord r;
      r.id = next_id++;
      r.label = cl.label;
      r.split = splits[i];
      r.dataset_tag = cl.dataset_tag;
      r.hidden.resize(spec.dimension);
      for (std::uint32_t j = 0; j < spec.dimension; ++j) {
        r.hidden[j] = static_cast<float>(cl.mean[j] + cl.stddev * rng.normal());
      }
      records.push_back(std::move(r));
    }
  }
  return EmbeddingStore::create(spec.dimension, std::move(records), spec.provenance);
}

EmbeddingStore perturb_gaussian(const EmbeddingStore& store, double sigma, std::uint64_t seed,
                                std::span<const double> drift) {
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw ValidationError("perturb: sigma must be non-negative");
  const std::size_t d = store.dimension();
  if (!drift.empty() && drift.size() != d) {
    throw DimensionError("perturb: drift has " + std::to_string(drift.size()) + " entries, dimension is " +
                         std::to_string(d));
  }
  for (double x : drift) {
    if (!std::isfinite(x)) throw ValidationError("perturb: drift must be finite");
  }
  Rng rng(seed);
  std::vector<EmbeddingRecord> records(store.records().begin(), store.records().end());
  for (auto& r : records) {
    for (std::size_t j = 0; j < d; ++j) {
      const double shift = drift.empty() ? 0.0 : drift[j];
      r.hidden[j] = static_cast<float>(static_cast<double>(r.hidden[j]) + shift + sigma * rng.normal());
    }
  }
  return EmbeddingStore::create(store.dimension(), std::move(records),
                                store.provenance() + " +gaussian(" + std::to_string(sigma) + ")");
}

SynthSpec two_cluster_layout(std::uint32_t dimension, double offset, double stddev, std::uint64_t per_class) {
  SynthSpec spec;
  spec.dimension = dimension;
  spec.provenance = "synth:two-cluster";
  for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
    SynthCluster c;
    c.mean.assign(dimension, label == 1 ? offset : -offset);
    c.stddev = stddev;
    c.count = per_class;
    c.label = label;
    spec.clusters.push_back(std::move(c));
  }
  return spec;
}

SynthSpec xor_layout(std::uint32_t dimension, double scale, double base, double stddev,
                     std::uint64_t per_cluster) {
  if (dimension < 3) throw ValidationError("xor layout needs dimension >= 3");
  SynthSpec spec;
  spec.dimension = dimension;
  spec.provenance = "synth:xor";
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) {
      SynthCluster c;
      c.mean.assign(dimension, 0.0);
      c.mean[0] = a * scale;
      c.mean[1] = b * scale;
      c.mean[dimension - 1] = base;
      c.stddev = stddev;
      c.count = per_cluster;
      c.label = (a == b) ? 1 : 0;
      spec.clusters.push_back(std::move(c));
    }
  }
  return spec;
}

SynthSpec confounder_layout(std::uint32_t dimension, std::uint32_t groups, std::uint64_t per_cluster,
                            double content_sd, double scale, double stddev, std::uint64_t layout_seed) {
  if (dimension < 2) throw ValidationError("confounder layout needs dimension >= 2");
  if (groups == 0) throw ValidationError("confounder layout needs at least one group");
  if (!(content_sd >= 0) || !std::isfinite(content_sd)) throw ValidationError("confounder layout: bad content_sd");
  Rng rng(layout_seed);
  SynthSpec spec;
  spec.dimension = dimension;
  spec.provenance = "synth:confounder";
  for (std::uint32_t g = 0; g < groups; ++g) {
    std::vector<double> content(dimension);
    for (double& x : content) x = content_sd * rng.normal();
    for (int a : {-1, 1}) {
      for (int b : {-1, 1}) {
        SynthCluster c;
        c.mean = content;
        c.mean[0] += a * scale;
        c.mean[1] += b * scale;
        c.stddev = stddev;
        c.count = per_cluster;
        c.label = (a == b) ? 1 : 0;
        spec.clusters.push_back(std::move(c));
      }
    }
  }
  return spec;
}

SynthSpec shifted_layout(std::uint32_t dimension, double separation, double shift, double rotate,
                         double stddev, std::uint64_t per_class, const std::string& tag) {
  if (dimension < 2) throw ValidationError("shifted layout needs dimension >= 2");
  SynthSpec spec;
  spec.dimension = dimension;
  spec.provenance = "synth:shifted:" + tag;
  const double ux = std::cos(rotate);
  const double uy = std::sin(rotate);
  for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
    const double s = label == 1 ? separation / 2 : -separation / 2;
    SynthCluster c;
    c.mean.assign(dimension, 0.0);
    c.mean[0] = shift + s * ux;
    c.mean[1] = s * uy;
    c.stddev = stddev;
    c.count = per_class;
    c.label = label;
    c.dataset_tag = tag;
    spec.clusters.push_back(std::move(c));
  }
  return spec;
}

}  // namespace embclf
