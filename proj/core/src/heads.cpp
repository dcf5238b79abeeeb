#include "embclf/heads.hpp"

#include <cmath>
#include <string>

#include "embclf/error.hpp"

namespace embclf {

namespace {

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  // Row-major draw order so the layout of Eigen's storage never affects the
  // values a seed produces.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
  }
}

void check_rows(const char* what, Eigen::Index got, std::size_t want) {
  if (static_cast<std::size_t>(got) != want) {
    throw DimensionError(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                         std::to_string(want));
  }
}

std::span<double> span_of(auto& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> span_of(const auto& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

// Derivative of cos(a, b) with respect to a, given unit copies and |a|.
Eigen::VectorXd cosine_grad(const Eigen::VectorXd& a_unit, const Eigen::VectorXd& b_unit, double cos, double a_norm) {
  return (b_unit - cos * a_unit) / a_norm;
}

double checked_norm(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0)) throw ValidationError(std::string("contrastive loss: zero-norm ") + what);
  return n;
}

}  // namespace

ProjectionHead ProjectionHead::zeros(std::size_t input, std::size_t hidden, std::size_t output) {
  const auto i = static_cast<Eigen::Index>(input);
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto o = static_cast<Eigen::Index>(output);
  return {Eigen::MatrixXd::Zero(h, i), Eigen::VectorXd::Zero(h), Eigen::MatrixXd::Zero(o, h),
          Eigen::VectorXd::Zero(o)};
}

ProjectionHead ProjectionHead::random_init(std::size_t input, std::size_t hidden, std::size_t output, Rng& rng) {
  auto head = zeros(input, hidden, output);
  fill_uniform(head.w1, 1.0 / std::sqrt(static_cast<double>(input)), rng);
  fill_uniform(head.w2, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  return head;
}

LogisticHead LogisticHead::zeros(std::size_t dim) { return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)), 0.0}; }

LogisticHead LogisticHead::random_init(std::size_t dim, Rng& rng) {
  auto head = zeros(dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < head.w.size(); ++i) head.w(i) = rng.uniform(-bound, bound);
  return head;
}

HeadParams HeadParams::zeros_like(const HeadParams& other) {
  return {ProjectionHead::zeros(other.proj.input_dim(), other.proj.hidden_dim(), other.proj.output_dim()),
          LogisticHead::zeros(static_cast<std::size_t>(other.lrc.w.size()))};
}

HeadParams HeadParams::random_init(std::size_t input, std::size_t hidden, std::size_t output, std::uint64_t seed) {
  Rng rng(seed);
  HeadParams p;
  p.proj = ProjectionHead::random_init(input, hidden, output, rng);
  p.lrc = LogisticHead::random_init(output, rng);
  return p;
}

std::array<std::span<double>, 6> HeadParams::tensors() {
  return {span_of(proj.w1), span_of(proj.b1), span_of(proj.w2), span_of(proj.b2), span_of(lrc.w),
          std::span<double>(&lrc.b, 1)};
}

std::array<std::span<const double>, 6> HeadParams::tensors() const {
  return {span_of(proj.w1), span_of(proj.b1), span_of(proj.w2), span_of(proj.b2), span_of(lrc.w),
          std::span<const double>(&lrc.b, 1)};
}

std::size_t HeadParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

bool HeadParams::same_shape(const HeadParams& o) const {
  return proj.w1.rows() == o.proj.w1.rows() && proj.w1.cols() == o.proj.w1.cols() &&
         proj.b1.size() == o.proj.b1.size() && proj.w2.rows() == o.proj.w2.rows() &&
         proj.w2.cols() == o.proj.w2.cols() && proj.b2.size() == o.proj.b2.size() && lrc.w.size() == o.lrc.w.size();
}

void round_to_float(HeadParams& params) {
  for (auto t : params.tensors()) {
    for (double& v : t) v = static_cast<double>(static_cast<float>(v));
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

Eigen::VectorXd project(const ProjectionHead& head, const Eigen::Ref<const Eigen::VectorXd>& h) {
  check_rows("projection input", h.size(), head.input_dim());
  const Eigen::VectorXd a = (head.w1 * h + head.b1).cwiseMax(0.0);
  return head.w2 * a + head.b2;
}

Eigen::MatrixXd project_batch(const ProjectionHead& head, const Eigen::Ref<const Eigen::MatrixXd>& h) {
  check_rows("projection input", h.rows(), head.input_dim());
  Eigen::MatrixXd a(head.w1.rows(), h.cols());
  a.noalias() = head.w1 * h;
  a.colwise() += head.b1;
  a = a.cwiseMax(0.0);
  Eigen::MatrixXd g(head.w2.rows(), h.cols());
  g.noalias() = head.w2 * a;
  g.colwise() += head.b2;
  return g;
}

double lrc_logit(const LogisticHead& head, const Eigen::Ref<const Eigen::VectorXd>& g) {
  check_rows("logistic head input", g.size(), static_cast<std::size_t>(head.w.size()));
  return head.w.dot(g) + head.b;
}

double lrc_forward(const LogisticHead& head, const Eigen::Ref<const Eigen::VectorXd>& g) {
  return sigmoid(lrc_logit(head, g));
}

double bce_loss(double p, std::uint8_t y) { return y ? -std::log(p) : -std::log1p(-p); }

double bce_loss_from_logit(double z, std::uint8_t y) { return softplus(z) - (y ? z : 0.0); }

double contrastive_loss(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& g_pos,
                        const Eigen::Ref<const Eigen::VectorXd>& g_neg) {
  if (g.size() != g_pos.size() || g.size() != g_neg.size()) {
    throw DimensionError("contrastive loss: vectors differ in dimension");
  }
  const double n = checked_norm(g, "query g");
  const double np = checked_norm(g_pos, "positive g+");
  const double nn = checked_norm(g_neg, "negative g-");
  const double s_pos = g.dot(g_pos) / (n * np);
  const double s_neg = g.dot(g_neg) / (n * nn);
  return softplus(s_neg - s_pos);
}

Stage2Result stage2_grads(const HeadParams& params, const Stage2Batch& batch, const LossFlags& flags) {
  if (flags.disable_cl && flags.disable_lr) {
    throw EmptyInputError("empty objective: both the contrastive and the logistic loss are disabled");
  }
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw EmptyInputError("stage-2 batch is empty");
  const auto& proj = params.proj;
  const auto& lrc = params.lrc;
  const auto d = static_cast<Eigen::Index>(proj.input_dim());
  if (lrc.w.size() != static_cast<Eigen::Index>(proj.output_dim())) {
    throw DimensionError("logistic head dimension does not match projection output");
  }
  check_rows("batch h", batch.h.rows(), proj.input_dim());
  if (batch.h.cols() != n) throw DimensionError("batch h column count differs from label count");
  const bool use_cl = !flags.disable_cl;
  if (use_cl) {
    check_rows("batch h_pos", batch.h_pos.rows(), proj.input_dim());
    check_rows("batch h_neg", batch.h_neg.rows(), proj.input_dim());
    if (batch.h_pos.cols() != n || batch.h_neg.cols() != n) {
      throw DimensionError("batch positives/negatives column count differs from label count");
    }
  }
  for (auto y : batch.labels) {
    if (y > 1) throw ValidationError("stage-2 batch label must be 0 or 1");
  }

  // Columns [0,n) are queries, [n,2n) positives, [2n,3n) negatives. With a
  // frozen or disabled contrastive term only the query block is
  // differentiated.
  const Eigen::Index grad_cols = (use_cl && !flags.freeze_mined) ? 3 * n : n;
  Eigen::MatrixXd x(d, use_cl ? 3 * n : n);
  x.leftCols(n) = batch.h;
  if (use_cl) {
    x.middleCols(n, n) = batch.h_pos;
    x.rightCols(n) = batch.h_neg;
  }
  Eigen::MatrixXd z1(proj.w1.rows(), x.cols());
  z1.noalias() = proj.w1 * x;
  z1.colwise() += proj.b1;
  const Eigen::MatrixXd a = z1.cwiseMax(0.0);
  Eigen::MatrixXd g(proj.w2.rows(), x.cols());
  g.noalias() = proj.w2 * a;
  g.colwise() += proj.b2;

  Stage2Result out;
  out.grads = HeadParams::zeros_like(params);
  Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(g.rows(), grad_cols);
  const double inv_n = 1.0 / static_cast<double>(n);

  if (use_cl) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto q = g.col(i);
      const auto gp = g.col(n + i);
      const auto gn = g.col(2 * n + i);
      const std::string where = " (batch example " + std::to_string(i) + ")";
      const double nq = q.norm(), np = gp.norm(), nn = gn.norm();
      if (!(nq > 0)) throw ValidationError("contrastive loss: zero-norm query g" + where);
      if (!(np > 0)) throw ValidationError("contrastive loss: zero-norm positive g+" + where);
      if (!(nn > 0)) throw ValidationError("contrastive loss: zero-norm negative g-" + where);
      const Eigen::VectorXd uq = q / nq, up = gp / np, un = gn / nn;
      const double s_pos = uq.dot(up);
      const double s_neg = uq.dot(un);
      total += softplus(s_neg - s_pos);
      // dL/ds_neg = sigma(s_neg - s_pos) = -dL/ds_pos
      const double w = sigmoid(s_neg - s_pos) * inv_n;
      dg.col(i) += w * (cosine_grad(uq, un, s_neg, nq) - cosine_grad(uq, up, s_pos, nq));
      if (!flags.freeze_mined) {
        dg.col(n + i) -= w * cosine_grad(up, uq, s_pos, np);
        dg.col(2 * n + i) += w * cosine_grad(un, uq, s_neg, nn);
      }
    }
    out.loss_cl = total * inv_n;
  }

  if (!flags.disable_lr) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = lrc.w.dot(g.col(i)) + lrc.b;
      const auto y = batch.labels[static_cast<std::size_t>(i)];
      total += bce_loss_from_logit(z, y);
      const double dz = (sigmoid(z) - static_cast<double>(y)) * inv_n;
      out.grads.lrc.w += dz * g.col(i);
      out.grads.lrc.b += dz;
      dg.col(i) += dz * lrc.w;
    }
    out.loss_lr = total * inv_n;
  }

  const auto a_used = a.leftCols(grad_cols);
  out.grads.proj.w2.noalias() = dg * a_used.transpose();
  out.grads.proj.b2 = dg.rowwise().sum();
  Eigen::MatrixXd dz1(proj.w2.cols(), grad_cols);
  dz1.noalias() = proj.w2.transpose() * dg;
  dz1 = dz1.cwiseProduct((z1.leftCols(grad_cols).array() > 0.0).cast<double>().matrix());
  out.grads.proj.w1.noalias() = dz1 * x.leftCols(grad_cols).transpose();
  out.grads.proj.b1 = dz1.rowwise().sum();
  return out;
}

}  // namespace embclf
