#pragma once

#include <cstdint>

#include "rim/nn/gru.hpp"
#include "rim/rng.hpp"

namespace rim::nn {

struct AdamConfig {
  double learning_rate = 1.0e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1.0e-8;
};

// Optimizer moments, step counter, clip threshold and the RNG stream used
// for dropout masks during training.
struct TrainState {
  AdamConfig adam;
  double clip_norm = 1.0;
  std::int64_t step = 0;
  GruNetwork moment1, moment2;
  Rng rng;

  TrainState(const GruNetwork& params, const AdamConfig& config, double clip,
             std::uint64_t seed)
      : adam(config),
        clip_norm(clip),
        moment1(make_zeros_like(params)),
        moment2(make_zeros_like(params)),
        rng(mix_seed(seed, 0x64726f70ULL)) {}
};

double global_grad_norm(GruNetwork& grads);

// Scales every gradient by clip_norm / norm when the global L2 norm exceeds
// clip_norm. Returns the pre-clip norm.
double clip_gradients(GruNetwork& grads, double clip_norm);

// Bias-corrected Adam update, applied in the fixed tensor-table order.
void adam_step(TrainState& state, GruNetwork& params, GruNetwork& grads);

}  // namespace rim::nn
