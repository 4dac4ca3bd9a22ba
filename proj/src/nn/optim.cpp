#include "rim/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rim::nn {

double global_grad_norm(GruNetwork& grads) {
  double sum_sq = 0.0;
  for (const TensorRef& ref : tensor_table(grads)) {
    for (std::ptrdiff_t i = 0; i < ref.size(); ++i) {
      sum_sq += ref.data[i] * ref.data[i];
    }
  }
  return std::sqrt(sum_sq);
}

double clip_gradients(GruNetwork& grads, double clip_norm) {
  if (!(clip_norm > 0.0)) {
    throw std::invalid_argument("clip_gradients: clip_norm must be positive");
  }
  const double norm = global_grad_norm(grads);
  if (norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (const TensorRef& ref : tensor_table(grads)) {
      for (std::ptrdiff_t i = 0; i < ref.size(); ++i) {
        ref.data[i] *= scale;
      }
    }
  }
  return norm;
}

void adam_step(TrainState& state, GruNetwork& params, GruNetwork& grads) {
  ++state.step;
  const AdamConfig& cfg = state.adam;
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  std::vector<TensorRef> p = tensor_table(params);
  std::vector<TensorRef> g = tensor_table(grads);
  std::vector<TensorRef> m = tensor_table(state.moment1);
  std::vector<TensorRef> v = tensor_table(state.moment2);
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient table mismatch");
  }

  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != g[i].size()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch at " + p[i].name);
    }
    Eigen::Map<Eigen::ArrayXd> param(p[i].data, p[i].size());
    Eigen::Map<const Eigen::ArrayXd> grad(g[i].data, g[i].size());
    Eigen::Map<Eigen::ArrayXd> m1(m[i].data, m[i].size());
    Eigen::Map<Eigen::ArrayXd> m2(v[i].data, v[i].size());

    m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * grad;
    m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * grad.square();
    param -= cfg.learning_rate * (m1 / correction1) /
             ((m2 / correction2).sqrt() + cfg.epsilon);
  }
}

}  // namespace rim::nn
