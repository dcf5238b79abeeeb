#pragma once

#include <cstdint>

#include "embclf/heads.hpp"

namespace embclf {

struct AdamWConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimState {
  AdamWConfig config;
  std::uint64_t step = 0;
  HeadParams first_moment;
  HeadParams second_moment;

  // Zero moments shaped like `params`.
  static OptimState init(const HeadParams& params, AdamWConfig config = {});
};

// L2 norm over every coordinate of every tensor.
double global_norm(const HeadParams& grads);

// Scales `grads` by max_norm / norm when norm > max_norm. Returns the norm
// before clipping.
double clip_global_norm(HeadParams& grads, double max_norm);

// Global-norm clipping to `clip`, then one AdamW update with decoupled
// weight decay applied to every parameter:
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2
//   p -= lr * (m/(1-b1^t) / (sqrt(v/(1-b2^t)) + eps) + wd * p)
// Throws ValidationError on a non-finite gradient (nothing is updated) or
// on mismatched shapes.
void optim_step(HeadParams& params, HeadParams grads, OptimState& state, double clip);

}  // namespace embclf
