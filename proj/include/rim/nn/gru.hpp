#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rim/rng.hpp"

namespace rim::nn {

// One direction's gate parameters. Input dimension D is 1 for the first
// layer and H for every deeper layer.
struct GruCellParams {
  Eigen::MatrixXd w_update, w_reset, w_cand;  // H x D
  Eigen::MatrixXd u_update, u_reset, u_cand;  // H x H
  Eigen::VectorXd b_update, b_reset, b_cand;  // H

  int hidden() const { return static_cast<int>(w_update.rows()); }
  int input_dim() const { return static_cast<int>(w_update.cols()); }

  static GruCellParams zeros(int hidden, int input_dim);
};

// Gate values of a single step, exposed for unit-level inspection.
struct GruCellCache {
  Eigen::VectorXd update, reset, cand, cand_rec;
};

// One recurrence step: update/reset gates, candidate state with the reset
// gate applied to the recurrent term, and the gated blend with h_prev.
Eigen::VectorXd gru_cell_step(const GruCellParams& params, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& h_prev, GruCellCache* cache = nullptr);

struct BiGruLayer {
  GruCellParams fwd, bwd;
  bool has_residual = false;
};

struct GruNetwork {
  std::vector<BiGruLayer> layers;
  int hidden_size = 0;
  int seq_len = 0;
  double dropout_rate = 0.0;

  int num_layers() const { return static_cast<int>(layers.size()); }

  // Records the structural choices a checkpoint must agree on before its
  // tensors can be loaded.
  std::string arch_tag() const;
};

// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases; layer 1 maps 1 -> H
// without a residual, deeper layers are H -> H with a residual connection.
GruNetwork make_network(int hidden_size, int num_layers, int seq_len, double dropout_rate,
                        std::uint64_t init_seed);

GruNetwork make_zeros_like(const GruNetwork& net);

enum class RunMode { kInference, kTraining };

// Everything the exact backward pass needs, batched: gate activations and
// hidden states per direction (in that direction's processing order), the
// layer inputs, and the scaled dropout masks.
struct DirectionTrace {
  Eigen::MatrixXd h;                         // H x (steps + 1) * batch; block 0 is the zero init
  Eigen::MatrixXd update, reset, cand, cand_rec;  // H x steps * batch
};

struct LayerTrace {
  Eigen::MatrixXd input;      // D x steps * batch, chronological
  Eigen::MatrixXd input_rev;  // same, time-reversed (feeds the backward direction)
  Eigen::MatrixXd mask;       // H x steps * batch; empty in inference mode
  DirectionTrace fwd, bwd;
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  int steps = 0;
  int batch = 0;
};

// One bidirectional layer over one sequence: left-to-right pass with the
// forward cell, right-to-left with the backward cell, outputs summed per
// timestep, inverted dropout applied to the sum in training mode. `inputs`
// is D x N; the result is H x N.
Eigen::MatrixXd bilayer_forward(const BiGruLayer& layer, const Eigen::MatrixXd& inputs,
                                RunMode mode, double dropout_rate = 0.0,
                                Rng* dropout_rng = nullptr);

// Runs the full stack on a batch of sequences (column b of `inputs` is one
// frame). Training mode draws inverted-dropout masks from `dropout_rng` and
// fills `trace` when given. Returns the average-pooled outputs, same shape
// as `inputs`.
Eigen::MatrixXd forward_batch(const GruNetwork& net, const Eigen::MatrixXd& inputs, RunMode mode,
                              Rng* dropout_rng = nullptr, ForwardTrace* trace = nullptr);

// Exact gradients of every parameter for the traced forward pass, given
// d(loss)/d(output). Returns a parameter-shaped gradient holder.
GruNetwork network_backward(const GruNetwork& net, const ForwardTrace& trace,
                            const Eigen::MatrixXd& d_output);

// Single-sequence convenience wrapper around forward_batch.
std::vector<double> network_forward(const GruNetwork& net, std::span<const double> input,
                                    RunMode mode, Rng* dropout_rng = nullptr,
                                    ForwardTrace* trace = nullptr);

// Sum of squared differences over the whole sequence (no averaging).
double sum_squared_error(std::span<const double> y, std::span<const double> y_hat);

struct TensorRef {
  std::string name;
  double* data = nullptr;
  std::ptrdiff_t rows = 0;
  std::ptrdiff_t cols = 0;

  std::ptrdiff_t size() const { return rows * cols; }
};

// Every parameter tensor in a fixed serialization order:
// per layer, forward then backward direction, W/U per gate then biases.
std::vector<TensorRef> tensor_table(GruNetwork& net);

}  // namespace rim::nn
