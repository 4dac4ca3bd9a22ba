#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rim/nn/gru.hpp"
#include "rim/sim/radar.hpp"

namespace rim::train {

struct TrainConfig {
  int batch_size = 128;
  double learning_rate = 1.0e-3;
  int hidden_size = 100;
  int num_layers = 3;
  double dropout_rate = 0.3;
  int epochs = 30;
  double clip_norm = 1.0;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // batches; 0 disables periodic checkpoints
  double val_fraction = 0.1;
  // Fixed shard reduction keeps results identical for any worker count.
  int num_threads = 2;

  void validate() const;
};

struct BatchStat {
  std::int64_t step = 0;
  int epoch = 0;
  int batch_index = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

struct EpochStat {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<BatchStat> batches;
  std::vector<EpochStat> epochs;
  std::int64_t steps = 0;
};

struct TrainResult {
  nn::GruNetwork best;
  nn::GruNetwork final;
  double best_val_loss = 0.0;
  int best_epoch = -1;
  TrainLog log;
};

// Deterministic shuffled batches for one epoch, keyed by (seed, epoch).
// The final short batch is kept.
std::vector<std::vector<std::uint32_t>> make_batches(std::size_t count, int batch_size,
                                                     std::uint64_t seed, int epoch);

// Deterministic 1 - val_fraction / val_fraction split by frame-index hash.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_train_val(
    std::size_t count, double val_fraction);

using CheckpointCallback = std::function<void(const nn::GruNetwork&, const std::string& label)>;
using EpochCallback = std::function<void(const EpochStat&)>;

// Full training loop: shuffle, forward, sum-squared-error loss averaged over
// the batch, exact backward, global-norm clipping, Adam. Tracks the
// best-validation network. Aborts with NumericError on a non-finite loss.
TrainResult train(const TrainConfig& config, const std::vector<sim::BeatFrame>& train_frames,
                  const std::vector<sim::BeatFrame>& val_frames,
                  const CheckpointCallback& on_checkpoint = {},
                  const EpochCallback& on_epoch = {});

// Mean per-frame loss in inference mode (dropout inactive).
double validate(const nn::GruNetwork& net, const std::vector<sim::BeatFrame>& frames,
                int num_threads = 2);

}  // namespace rim::train
