#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "embclf/random.hpp"

namespace embclf {

inline constexpr std::uint32_t kDefaultHiddenDim = 1024;
inline constexpr std::uint32_t kDefaultProjectionDim = 1024;

// Two-layer MLP h -> g: g = W2 * relu(W1 * h + b1) + b2.
struct ProjectionHead {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // output x hidden
  Eigen::VectorXd b2;  // output

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_dim() const { return static_cast<std::size_t>(w1.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(w2.rows()); }

  static ProjectionHead zeros(std::size_t input, std::size_t hidden, std::size_t output);
  // Weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static ProjectionHead random_init(std::size_t input, std::size_t hidden, std::size_t output, Rng& rng);
};

// Affine map followed by a sigmoid: p = sigmoid(w . g + b).
struct LogisticHead {
  Eigen::VectorXd w;
  double b = 0.0;

  static LogisticHead zeros(std::size_t dim);
  static LogisticHead random_init(std::size_t dim, Rng& rng);
};

// Every trainable parameter of the two heads. The same layout doubles as
// the container for gradients and optimizer moments.
struct HeadParams {
  ProjectionHead proj;
  LogisticHead lrc;

  static HeadParams zeros_like(const HeadParams& other);
  static HeadParams random_init(std::size_t input, std::size_t hidden, std::size_t output, std::uint64_t seed);

  // Views of the six tensors in checkpoint order: W1, b1, W2, b2, w, b.
  // Matrices are column-major (Eigen storage).
  std::array<std::span<double>, 6> tensors();
  std::array<std::span<const double>, 6> tensors() const;
  std::size_t parameter_count() const;
  bool same_shape(const HeadParams& other) const;
};

// Rounds every parameter to the nearest 32-bit float, the precision the
// checkpoint format stores.
void round_to_float(HeadParams& params);

double sigmoid(double z);
// log(1 + e^z) without overflow.
double softplus(double z);
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

// Throws DimensionError if h has the wrong length.
Eigen::VectorXd project(const ProjectionHead& head, const Eigen::Ref<const Eigen::VectorXd>& h);
// Column-wise project() over a d x n block.
Eigen::MatrixXd project_batch(const ProjectionHead& head, const Eigen::Ref<const Eigen::MatrixXd>& h);

double lrc_logit(const LogisticHead& head, const Eigen::Ref<const Eigen::VectorXd>& g);
double lrc_forward(const LogisticHead& head, const Eigen::Ref<const Eigen::VectorXd>& g);

// Binary cross-entropy of probability p against label y.
double bce_loss(double p, std::uint8_t y);
// Same quantity evaluated from the logit z: softplus(z) - y*z.
double bce_loss_from_logit(double z, std::uint8_t y);

// -log(e^{s+} / (e^{s+} + e^{s-})) with s+/- the cosine similarities of g to
// g_pos and g_neg; no temperature. Throws ValidationError naming the
// zero-norm argument.
double contrastive_loss(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& g_pos,
                        const Eigen::Ref<const Eigen::VectorXd>& g_neg);

struct LossFlags {
  bool disable_cl = false;
  bool disable_lr = false;
  // Treat the mined projections as constants (no gradient through g+ / g-).
  bool freeze_mined = false;
};

// Columns are examples. h_pos/h_neg may be empty when disable_cl is set.
struct Stage2Batch {
  Eigen::MatrixXd h;
  Eigen::MatrixXd h_pos;
  Eigen::MatrixXd h_neg;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
};

struct Stage2Result {
  HeadParams grads;
  double loss_cl = 0.0;  // batch mean, 0 when disabled
  double loss_lr = 0.0;  // batch mean, 0 when disabled
};

// Analytic gradient of mean_i [L_cl(i) + L_lr(i)] over the batch, with each
// term dropped when its flag is set. The query, positive and negative are
// all projected by `params.proj`; unless freeze_mined is set the gradient
// flows through all three. Throws EmptyInputError if both terms are
// disabled or the batch is empty, DimensionError on shape mismatches.
Stage2Result stage2_grads(const HeadParams& params, const Stage2Batch& batch, const LossFlags& flags);

}  // namespace embclf
