#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embclf/store.hpp"

namespace embclf {

// One isotropic Gaussian blob of records.
struct SynthCluster {
  std::vector<double> mean;
  double stddev = 1.0;
  std::uint64_t count = 0;
  std::uint8_t label = 0;
  std::string dataset_tag = "synth";
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct SynthSpec {
  std::uint32_t dimension = 0;
  std::vector<SynthCluster> clusters;
  SplitFractions splits;
  std::string provenance = "synth";
};

// Draws every cluster's records from N(mean, stddev^2 I). Ids run from 0 in
// cluster order. Splits are assigned per cluster by a seeded shuffle with
// round(fraction * count) train and val records and the rest test, so the
// class balance carries into every split. Throws ValidationError on a
// non-positive stddev or count, a mean of the wrong length, a label outside
// {0,1}, or fractions that are negative or do not sum to 1 within 1e-9.
EmbeddingStore synth_generate(const SynthSpec& spec, std::uint64_t seed);

// Copy of `store` with N(drift, sigma^2 I) noise added to every hidden
// vector. A non-empty `drift` (length = dimension) moves every embedding the
// same way, the way a corruption of the input shifts an encoder's output;
// an empty one gives zero-mean noise. Ids, labels, splits and tags are
// preserved.
EmbeddingStore perturb_gaussian(const EmbeddingStore& store, double sigma, std::uint64_t seed,
                                std::span<const double> drift = {});

// Canned layouts used by the tests and the acceptance harness.

// Two classes with means at -offset*1 (label 0) and +offset*1 (label 1).
SynthSpec two_cluster_layout(std::uint32_t dimension, double offset, double stddev, std::uint64_t per_class);

// Four clusters at the corners (+-scale, +-scale) of a plane spanned by the
// first two coordinate axes, all shifted by `base` along the last axis.
// Corners whose factor signs agree carry label 1, the others label 0, so
// neither factor alone (nor any affine function of h) predicts the label.
SynthSpec xor_layout(std::uint32_t dimension, double scale, double base, double stddev,
                     std::uint64_t per_cluster);

// Confounder layout: `groups` content means drawn from N(0, content_sd^2 I)
// with `layout_seed`; around each one, four corner clusters offset by
// (+-scale, +-scale) on the first two axes, labelled as in xor_layout. Each
// group is a shared "content" whose label flips with a small change, so a
// nearest neighbour in content is usually a confounder of the other class.
SynthSpec confounder_layout(std::uint32_t dimension, std::uint32_t groups, std::uint64_t per_cluster,
                            double content_sd, double scale, double stddev, std::uint64_t layout_seed);

// Two-class layout for domain-shift experiments. The class direction is
// coordinate 0; `shift` translates both classes along it and `rotate`
// (radians) tilts the class direction toward coordinate 1. Domain A uses
// shift=0, rotate=0.
SynthSpec shifted_layout(std::uint32_t dimension, double separation, double shift, double rotate,
                         double stddev, std::uint64_t per_class, const std::string& tag);

}  // namespace embclf
