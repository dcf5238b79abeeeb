#pragma once

// Random problem instances shared by the unit tests and the acceptance
// harness.

#include <cmath>
#include <cstdint>

#include "embclf/heads.hpp"
#include "embclf/random.hpp"
#include "oracles.hpp"

namespace embclf::fixture {

struct GradCase {
  HeadParams params;
  Stage2Batch batch;
};

// Smallest |pre-activation| of the first layer over every projected column.
// Finite differences are meaningless within `step` of a ReLU kink.
inline double kink_margin(const HeadParams& p, const Stage2Batch& b) {
  double m = INFINITY;
  for (const Eigen::MatrixXd* x : {&b.h, &b.h_pos, &b.h_neg}) {
    if (x->cols() == 0) continue;
    const Eigen::MatrixXd z = (p.proj.w1 * *x).colwise() + p.proj.b1;
    m = std::min(m, z.cwiseAbs().minCoeff());
  }
  return m;
}

// Random heads (weights scaled up so every term matters) and a random batch,
// redrawn until no first-layer unit sits within 1e-2 of its kink.
inline GradCase random_grad_case(std::uint64_t seed, std::size_t d = 8, std::size_t hidden = 4,
                                 std::size_t p = 4, std::size_t n = 3) {
  Rng rng(seed);
  for (;;) {
    GradCase c;
    c.params = HeadParams::random_init(d, hidden, p, rng.next_u64());
    for (auto t : c.params.tensors()) {
      for (double& x : t) x = rng.uniform(-1.0, 1.0);
    }
    const auto cols = static_cast<Eigen::Index>(n);
    const auto rows = static_cast<Eigen::Index>(d);
    c.batch.h.resize(rows, cols);
    c.batch.h_pos.resize(rows, cols);
    c.batch.h_neg.resize(rows, cols);
    for (Eigen::MatrixXd* m : {&c.batch.h, &c.batch.h_pos, &c.batch.h_neg}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.normal();
    }
    for (std::size_t i = 0; i < n; ++i) c.batch.labels.push_back(static_cast<std::uint8_t>(rng.below(2)));
    if (kink_margin(c.params, c.batch) >= 1e-2) return c;
  }
}

// Mismatching coordinates between stage2_grads and central differences of
// the directly evaluated objective.
inline std::vector<oracle::GradMismatch> check_grads(const GradCase& c, const LossFlags& flags,
                                                     std::size_t* checked = nullptr, double step = 1e-4,
                                                     double rel_tol = 1e-4, double abs_floor = 1e-7) {
  const auto analytic = stage2_grads(c.params, c.batch, flags).grads;
  const HeadParams frozen = c.params;
  const auto f = [&](const HeadParams& p) {
    return oracle::stage2_objective(p, flags.freeze_mined ? frozen : p, c.batch, !flags.disable_cl, !flags.disable_lr);
  };
  return oracle::finite_difference_check(c.params, analytic, f, step, rel_tol, abs_floor, checked);
}

}  // namespace embclf::fixture
