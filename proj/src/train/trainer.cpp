#include "rim/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rim/common.hpp"
#include "rim/errors.hpp"
#include "rim/nn/optim.hpp"
#include "rim/rng.hpp"

namespace rim::train {

namespace {

// Two fixed shards per batch: the reduction order (and therefore every bit of
// the result) is independent of how many workers actually run.
constexpr int kShards = 2;
constexpr std::uint64_t kShuffleStream = 0x73687566ULL;
constexpr std::uint64_t kSplitStream = 0x73706c74ULL;

struct ShardResult {
  nn::GruNetwork grads;
  double loss_sum = 0.0;
  std::exception_ptr error;
};

void accumulate(nn::GruNetwork& into, nn::GruNetwork& from) {
  std::vector<nn::TensorRef> dst = tensor_table(into);
  std::vector<nn::TensorRef> src = tensor_table(from);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    Eigen::Map<Eigen::ArrayXd>(dst[i].data, dst[i].size()) +=
        Eigen::Map<const Eigen::ArrayXd>(src[i].data, src[i].size());
  }
}

Eigen::MatrixXd gather_columns(const std::vector<sim::BeatFrame>& frames,
                               const std::vector<std::uint32_t>& indices, bool labels,
                               std::size_t begin, std::size_t end) {
  Eigen::MatrixXd out(kFrameLen, static_cast<Eigen::Index>(end - begin));
  for (std::size_t c = begin; c < end; ++c) {
    const sim::BeatFrame& frame = frames[indices[c]];
    const std::vector<double>& src = labels ? frame.label : frame.input;
    for (int t = 0; t < kFrameLen; ++t) {
      out(t, static_cast<Eigen::Index>(c - begin)) = src[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

void run_shard(const nn::GruNetwork& net, const Eigen::MatrixXd& inputs,
               const Eigen::MatrixXd& labels, std::uint64_t mask_seed, int total_batch,
               ShardResult& result) {
  try {
    Rng rng(mask_seed);
    nn::ForwardTrace trace;
    const Eigen::MatrixXd outputs =
        nn::forward_batch(net, inputs, nn::RunMode::kTraining, &rng, &trace);
    result.loss_sum = (outputs - labels).squaredNorm();
    const Eigen::MatrixXd d_output =
        2.0 / static_cast<double>(total_batch) * (outputs - labels);
    result.grads = nn::network_backward(net, trace, d_output);
  } catch (...) {
    result.error = std::current_exception();
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (hidden_size < 1) throw std::invalid_argument("hidden_size must be positive");
  if (num_layers < 1) throw std::invalid_argument("num_layers must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout_rate must lie in [0, 1)");
  }
  if (epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be positive");
  if (checkpoint_every < 0) throw std::invalid_argument("checkpoint_every must be non-negative");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw std::invalid_argument("val_fraction must lie in [0, 1)");
  }
  if (num_threads < 1) throw std::invalid_argument("num_threads must be positive");
}

std::vector<std::vector<std::uint32_t>> make_batches(std::size_t count, int batch_size,
                                                     std::uint64_t seed, int epoch) {
  if (count == 0) {
    throw std::invalid_argument("make_batches: empty dataset");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("make_batches: batch_size must be positive");
  }
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0U);
  Rng rng(mix_seed(mix_seed(seed, kShuffleStream), static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = count - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<std::uint32_t>> batches;
  for (std::size_t begin = 0; begin < count; begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(count, begin + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_train_val(
    std::size_t count, double val_fraction) {
  std::vector<std::uint32_t> train_idx, val_idx;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = static_cast<double>(splitmix64(mix_seed(kSplitStream, i)) >> 11) * 0x1.0p-53;
    if (u < val_fraction) {
      val_idx.push_back(static_cast<std::uint32_t>(i));
    } else {
      train_idx.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return {std::move(train_idx), std::move(val_idx)};
}

double validate(const nn::GruNetwork& net, const std::vector<sim::BeatFrame>& frames,
                int num_threads) {
  if (frames.empty()) {
    throw std::invalid_argument("validate: empty dataset");
  }
  (void)num_threads;  // chunks are processed in a fixed order either way
  constexpr std::size_t kChunk = 128;
  std::vector<std::uint32_t> all(frames.size());
  std::iota(all.begin(), all.end(), 0U);

  double loss_sum = 0.0;
  for (std::size_t begin = 0; begin < frames.size(); begin += kChunk) {
    const std::size_t end = std::min(frames.size(), begin + kChunk);
    const Eigen::MatrixXd inputs = gather_columns(frames, all, false, begin, end);
    const Eigen::MatrixXd labels = gather_columns(frames, all, true, begin, end);
    const Eigen::MatrixXd outputs = nn::forward_batch(net, inputs, nn::RunMode::kInference);
    loss_sum += (outputs - labels).squaredNorm();
  }
  return loss_sum / static_cast<double>(frames.size());
}

TrainResult train(const TrainConfig& config, const std::vector<sim::BeatFrame>& train_frames,
                  const std::vector<sim::BeatFrame>& val_frames,
                  const CheckpointCallback& on_checkpoint, const EpochCallback& on_epoch) {
  config.validate();
  if (train_frames.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  for (const sim::BeatFrame& f : train_frames) {
    if (f.input.size() != static_cast<std::size_t>(kFrameLen) ||
        f.label.size() != static_cast<std::size_t>(kFrameLen)) {
      throw FormatError("train: frame length does not match the network sequence length");
    }
  }

  TrainResult result;
  result.final = nn::make_network(config.hidden_size, config.num_layers, kFrameLen,
                                  config.dropout_rate, config.seed);
  result.best = result.final;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  if (config.epochs == 0) {
    return result;
  }

  nn::GruNetwork& net = result.final;
  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  nn::TrainState state(net, adam, config.clip_norm, config.seed);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    const auto batches = make_batches(train_frames.size(), config.batch_size, config.seed, epoch);
    double epoch_loss_sum = 0.0;

    for (int batch_index = 0; batch_index < static_cast<int>(batches.size()); ++batch_index) {
      const std::vector<std::uint32_t>& batch = batches[static_cast<std::size_t>(batch_index)];
      const int total = static_cast<int>(batch.size());
      const std::size_t split = (batch.size() + 1) / 2;
      const std::uint64_t batch_seed = state.rng.next_u64();

      ShardResult shards[kShards];
      Eigen::MatrixXd in0 = gather_columns(train_frames, batch, false, 0, split);
      Eigen::MatrixXd lb0 = gather_columns(train_frames, batch, true, 0, split);
      Eigen::MatrixXd in1, lb1;
      const bool has_second = split < batch.size();
      if (has_second) {
        in1 = gather_columns(train_frames, batch, false, split, batch.size());
        lb1 = gather_columns(train_frames, batch, true, split, batch.size());
      }

      if (has_second && config.num_threads > 1) {
        std::thread worker(run_shard, std::cref(net), std::cref(in1), std::cref(lb1),
                           mix_seed(batch_seed, 1), total, std::ref(shards[1]));
        run_shard(net, in0, lb0, mix_seed(batch_seed, 0), total, shards[0]);
        worker.join();
      } else {
        run_shard(net, in0, lb0, mix_seed(batch_seed, 0), total, shards[0]);
        if (has_second) {
          run_shard(net, in1, lb1, mix_seed(batch_seed, 1), total, shards[1]);
        }
      }
      for (ShardResult& shard : shards) {
        if (shard.error) std::rethrow_exception(shard.error);
      }

      nn::GruNetwork grads = std::move(shards[0].grads);
      if (has_second) {
        accumulate(grads, shards[1].grads);
      }
      const double batch_loss =
          (shards[0].loss_sum + shards[1].loss_sum) / static_cast<double>(total);
      if (!std::isfinite(batch_loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ", step " +
                           std::to_string(state.step + 1));
      }

      const double grad_norm = nn::clip_gradients(grads, config.clip_norm);
      nn::adam_step(state, net, grads);

      epoch_loss_sum += batch_loss * static_cast<double>(total);
      result.log.batches.push_back(
          BatchStat{state.step, epoch, batch_index, batch_loss, grad_norm});
      if (config.checkpoint_every > 0 && on_checkpoint &&
          state.step % config.checkpoint_every == 0) {
        on_checkpoint(net, "step-" + std::to_string(state.step));
      }
    }

    const double train_loss = epoch_loss_sum / static_cast<double>(train_frames.size());
    const double val_loss =
        val_frames.empty() ? train_loss : validate(net, val_frames, config.num_threads);
    if (!std::isfinite(val_loss)) {
      throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    result.log.epochs.push_back(EpochStat{epoch, train_loss, val_loss, seconds});
    if (on_epoch) on_epoch(result.log.epochs.back());

    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.best = net;
    }
  }

  result.log.steps = state.step;
  return result;
}

}  // namespace rim::train
