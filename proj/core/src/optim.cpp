#include "embclf/optim.hpp"

#include <cmath>

#include "embclf/error.hpp"

namespace embclf {

OptimState OptimState::init(const HeadParams& params, AdamWConfig config) {
  return {config, 0, HeadParams::zeros_like(params), HeadParams::zeros_like(params)};
}

double global_norm(const HeadParams& grads) {
  double sum = 0.0;
  for (const auto& t : grads.tensors()) {
    for (double v : t) sum += v * v;
  }
  return std::sqrt(sum);
}

double clip_global_norm(HeadParams& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto t : grads.tensors()) {
      for (double& v : t) v *= scale;
    }
  }
  return norm;
}

void optim_step(HeadParams& params, HeadParams grads, OptimState& state, double clip) {
  if (!(clip > 0)) throw ValidationError("gradient clip value must be positive");
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw DimensionError("optimizer step: parameter, gradient and moment shapes differ");
  }
  static constexpr const char* kNames[6] = {"W1", "b1", "W2", "b2", "w", "b"};
  {
    const auto ts = grads.tensors();
    for (std::size_t k = 0; k < ts.size(); ++k) {
      for (double v : ts[k]) {
        if (!std::isfinite(v)) throw ValidationError(std::string("non-finite gradient in ") + kNames[k]);
      }
    }
  }
  clip_global_norm(grads, clip);

  const auto& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);

  auto p = params.tensors();
  const auto g = std::as_const(grads).tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      const double gi = g[k][i];
      m[k][i] = c.beta1 * m[k][i] + (1.0 - c.beta1) * gi;
      v[k][i] = c.beta2 * v[k][i] + (1.0 - c.beta2) * gi * gi;
      const double m_hat = m[k][i] / bias1;
      const double v_hat = v[k][i] / bias2;
      p[k][i] -= c.learning_rate * (m_hat / (std::sqrt(v_hat) + c.epsilon) + c.weight_decay * p[k][i]);
    }
  }
}

}  // namespace embclf
