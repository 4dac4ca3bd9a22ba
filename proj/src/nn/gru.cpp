#include "rim/nn/gru.hpp"

#include <cmath>
#include <stdexcept>

namespace rim::nn {

namespace {

void sigmoid_inplace(Eigen::MatrixXd& m) {
  m.array() = 1.0 / (1.0 + (-m.array()).exp());
}

// Swaps block t with block steps-1-t, where each block is `batch` columns.
Eigen::MatrixXd reverse_blocks(const Eigen::MatrixXd& m, int steps, int batch) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int t = 0; t < steps; ++t) {
    out.middleCols(static_cast<Eigen::Index>(t) * batch, batch) =
        m.middleCols(static_cast<Eigen::Index>(steps - 1 - t) * batch, batch);
  }
  return out;
}

// Runs one direction over its processing-order input. Returns the H x
// steps*batch hidden-state sequence; fills `tr` when given.
Eigen::MatrixXd direction_forward(const GruCellParams& p, const Eigen::MatrixXd& x_proc,
                                  int steps, int batch, DirectionTrace* tr) {
  const int h_dim = p.hidden();
  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * batch;

  // Input contributions for the whole sequence in three large products.
  Eigen::MatrixXd pre_update = p.w_update * x_proc;
  Eigen::MatrixXd pre_reset = p.w_reset * x_proc;
  Eigen::MatrixXd pre_cand = p.w_cand * x_proc;
  pre_update.colwise() += p.b_update;
  pre_reset.colwise() += p.b_reset;
  pre_cand.colwise() += p.b_cand;

  if (tr != nullptr) {
    tr->h.setZero(h_dim, cols + batch);
    tr->update.resize(h_dim, cols);
    tr->reset.resize(h_dim, cols);
    tr->cand.resize(h_dim, cols);
    tr->cand_rec.resize(h_dim, cols);
  }

  Eigen::MatrixXd out(h_dim, cols);
  Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(h_dim, batch);
  Eigen::MatrixXd update(h_dim, batch), reset(h_dim, batch), cand(h_dim, batch),
      cand_rec(h_dim, batch), h_new(h_dim, batch);
  for (int t = 0; t < steps; ++t) {
    const Eigen::Index offset = static_cast<Eigen::Index>(t) * batch;
    update.noalias() = p.u_update * h_prev;
    update += pre_update.middleCols(offset, batch);
    sigmoid_inplace(update);

    reset.noalias() = p.u_reset * h_prev;
    reset += pre_reset.middleCols(offset, batch);
    sigmoid_inplace(reset);

    cand_rec.noalias() = p.u_cand * h_prev;
    cand = pre_cand.middleCols(offset, batch);
    cand.array() += reset.array() * cand_rec.array();
    cand.array() = cand.array().tanh();

    h_new.array() =
        (1.0 - update.array()) * h_prev.array() + update.array() * cand.array();

    out.middleCols(offset, batch) = h_new;
    if (tr != nullptr) {
      tr->update.middleCols(offset, batch) = update;
      tr->reset.middleCols(offset, batch) = reset;
      tr->cand.middleCols(offset, batch) = cand;
      tr->cand_rec.middleCols(offset, batch) = cand_rec;
      tr->h.middleCols(offset + batch, batch) = h_new;
    }
    h_prev.swap(h_new);
  }
  return out;
}

// Reverse-mode sweep of one direction. dh_out is the gradient at this
// direction's hidden outputs, in processing order; parameter gradients
// accumulate into `g`, input gradients into dx_acc (processing order).
void direction_backward(const GruCellParams& p, const DirectionTrace& tr,
                        const Eigen::MatrixXd& x_proc, const Eigen::MatrixXd& dh_out,
                        GruCellParams& g, Eigen::MatrixXd& dx_acc) {
  const int h_dim = p.hidden();
  const Eigen::Index cols = dh_out.cols();
  // The h cache carries one extra block (the zero initial state).
  const int b = static_cast<int>(tr.h.cols() - tr.update.cols());
  const int steps = static_cast<int>(tr.update.cols() / b);

  Eigen::MatrixXd da_update(h_dim, cols), da_reset(h_dim, cols), da_cand(h_dim, cols),
      d_cand_rec(h_dim, cols);
  Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(h_dim, b);
  Eigen::MatrixXd dh(h_dim, b), tmp(h_dim, b);

  for (int t = steps - 1; t >= 0; --t) {
    const Eigen::Index offset = static_cast<Eigen::Index>(t) * b;
    const auto h_prev = tr.h.middleCols(offset, b);
    const auto update = tr.update.middleCols(offset, b);
    const auto reset = tr.reset.middleCols(offset, b);
    const auto cand = tr.cand.middleCols(offset, b);
    const auto cand_rec = tr.cand_rec.middleCols(offset, b);

    dh = dh_out.middleCols(offset, b) + carry;

    auto da_z = da_update.middleCols(offset, b);
    auto da_r = da_reset.middleCols(offset, b);
    auto da_n = da_cand.middleCols(offset, b);
    auto dq = d_cand_rec.middleCols(offset, b);

    da_z.array() = dh.array() * (cand.array() - h_prev.array()) * update.array() *
                   (1.0 - update.array());
    da_n.array() = dh.array() * update.array() * (1.0 - cand.array().square());
    da_r.array() = da_n.array() * cand_rec.array() * reset.array() * (1.0 - reset.array());
    dq.array() = da_n.array() * reset.array();

    carry.array() = dh.array() * (1.0 - update.array());
    tmp.noalias() = p.u_update.transpose() * da_z;
    carry += tmp;
    tmp.noalias() = p.u_reset.transpose() * da_r;
    carry += tmp;
    tmp.noalias() = p.u_cand.transpose() * dq;
    carry += tmp;
  }

  const auto h_prev_all = tr.h.leftCols(cols);
  g.w_update.noalias() += da_update * x_proc.transpose();
  g.w_reset.noalias() += da_reset * x_proc.transpose();
  g.w_cand.noalias() += da_cand * x_proc.transpose();
  g.u_update.noalias() += da_update * h_prev_all.transpose();
  g.u_reset.noalias() += da_reset * h_prev_all.transpose();
  g.u_cand.noalias() += d_cand_rec * h_prev_all.transpose();
  g.b_update += da_update.rowwise().sum();
  g.b_reset += da_reset.rowwise().sum();
  g.b_cand += da_cand.rowwise().sum();

  dx_acc.noalias() += p.w_update.transpose() * da_update;
  dx_acc.noalias() += p.w_reset.transpose() * da_reset;
  dx_acc.noalias() += p.w_cand.transpose() * da_cand;
}

}  // namespace

GruCellParams GruCellParams::zeros(int hidden, int input_dim) {
  GruCellParams p;
  p.w_update = Eigen::MatrixXd::Zero(hidden, input_dim);
  p.w_reset = Eigen::MatrixXd::Zero(hidden, input_dim);
  p.w_cand = Eigen::MatrixXd::Zero(hidden, input_dim);
  p.u_update = Eigen::MatrixXd::Zero(hidden, hidden);
  p.u_reset = Eigen::MatrixXd::Zero(hidden, hidden);
  p.u_cand = Eigen::MatrixXd::Zero(hidden, hidden);
  p.b_update = Eigen::VectorXd::Zero(hidden);
  p.b_reset = Eigen::VectorXd::Zero(hidden);
  p.b_cand = Eigen::VectorXd::Zero(hidden);
  return p;
}

Eigen::VectorXd gru_cell_step(const GruCellParams& params, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& h_prev, GruCellCache* cache) {
  if (x.size() != params.input_dim() || h_prev.size() != params.hidden()) {
    throw std::invalid_argument("gru_cell_step: shape mismatch");
  }
  Eigen::VectorXd a_update = params.w_update * x + params.u_update * h_prev + params.b_update;
  Eigen::VectorXd a_reset = params.w_reset * x + params.u_reset * h_prev + params.b_reset;
  Eigen::VectorXd update = (1.0 / (1.0 + (-a_update.array()).exp())).matrix();
  Eigen::VectorXd reset = (1.0 / (1.0 + (-a_reset.array()).exp())).matrix();
  Eigen::VectorXd cand_rec = params.u_cand * h_prev;
  Eigen::VectorXd cand =
      ((params.w_cand * x + params.b_cand).array() + reset.array() * cand_rec.array())
          .tanh()
          .matrix();
  Eigen::VectorXd h =
      ((1.0 - update.array()) * h_prev.array() + update.array() * cand.array()).matrix();
  if (cache != nullptr) {
    cache->update = update;
    cache->reset = reset;
    cache->cand = cand;
    cache->cand_rec = cand_rec;
  }
  return h;
}

std::string GruNetwork::arch_tag() const {
  return "bigru-residual-v1/merge=sum/candidate=reset-on-recurrent/"
         "residual-from=layer2/pool=mean";
}

GruNetwork make_network(int hidden_size, int num_layers, int seq_len, double dropout_rate,
                        std::uint64_t init_seed) {
  if (hidden_size < 1 || num_layers < 1 || seq_len < 1) {
    throw std::invalid_argument("make_network: hidden_size, num_layers, seq_len must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("make_network: dropout_rate must lie in [0, 1)");
  }
  GruNetwork net;
  net.hidden_size = hidden_size;
  net.seq_len = seq_len;
  net.dropout_rate = dropout_rate;
  for (int l = 0; l < num_layers; ++l) {
    BiGruLayer layer;
    const int input_dim = l == 0 ? 1 : hidden_size;
    layer.fwd = GruCellParams::zeros(hidden_size, input_dim);
    layer.bwd = GruCellParams::zeros(hidden_size, input_dim);
    layer.has_residual = l > 0;
    net.layers.push_back(std::move(layer));
  }

  Rng rng(mix_seed(init_seed, 0x696e6974ULL));
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  for (TensorRef& ref : tensor_table(net)) {
    if (ref.name.find(".b_") != std::string::npos) continue;  // biases stay zero
    for (std::ptrdiff_t i = 0; i < ref.size(); ++i) {
      ref.data[i] = rng.uniform(-bound, bound);
    }
  }
  return net;
}

GruNetwork make_zeros_like(const GruNetwork& net) {
  GruNetwork out;
  out.hidden_size = net.hidden_size;
  out.seq_len = net.seq_len;
  out.dropout_rate = net.dropout_rate;
  for (const BiGruLayer& layer : net.layers) {
    BiGruLayer z;
    z.fwd = GruCellParams::zeros(layer.fwd.hidden(), layer.fwd.input_dim());
    z.bwd = GruCellParams::zeros(layer.bwd.hidden(), layer.bwd.input_dim());
    z.has_residual = layer.has_residual;
    out.layers.push_back(std::move(z));
  }
  return out;
}

Eigen::MatrixXd bilayer_forward(const BiGruLayer& layer, const Eigen::MatrixXd& inputs,
                                RunMode mode, double dropout_rate, Rng* dropout_rng) {
  const int steps = static_cast<int>(inputs.cols());
  if (steps < 1) {
    throw std::invalid_argument("bilayer_forward: empty sequence");
  }
  if (inputs.rows() != layer.fwd.input_dim()) {
    throw std::invalid_argument("bilayer_forward: input dimension mismatch");
  }
  const Eigen::MatrixXd inputs_rev = reverse_blocks(inputs, steps, 1);
  const Eigen::MatrixXd h_fwd = direction_forward(layer.fwd, inputs, steps, 1, nullptr);
  const Eigen::MatrixXd h_bwd = direction_forward(layer.bwd, inputs_rev, steps, 1, nullptr);

  Eigen::MatrixXd merged(layer.fwd.hidden(), steps);
  for (int t = 0; t < steps; ++t) {
    merged.col(t) = h_fwd.col(t) + h_bwd.col(steps - 1 - t);
  }
  if (mode == RunMode::kTraining && dropout_rate > 0.0) {
    if (dropout_rng == nullptr) {
      throw std::invalid_argument("bilayer_forward: training with dropout needs an RNG");
    }
    const double keep = 1.0 - dropout_rate;
    const double scale = 1.0 / keep;
    double* data = merged.data();
    for (Eigen::Index i = 0; i < merged.size(); ++i) {
      data[i] *= dropout_rng->uniform() < keep ? scale : 0.0;
    }
  }
  return merged;
}

Eigen::MatrixXd forward_batch(const GruNetwork& net, const Eigen::MatrixXd& inputs, RunMode mode,
                              Rng* dropout_rng, ForwardTrace* trace) {
  const int steps = net.seq_len;
  const int batch = static_cast<int>(inputs.cols());
  if (inputs.rows() != steps) {
    throw std::invalid_argument("forward_batch: input rows must equal seq_len");
  }
  if (batch < 1) {
    throw std::invalid_argument("forward_batch: empty batch");
  }
  const bool use_dropout =
      mode == RunMode::kTraining && net.dropout_rate > 0.0 && dropout_rng != nullptr;
  if (mode == RunMode::kTraining && net.dropout_rate > 0.0 && dropout_rng == nullptr) {
    throw std::invalid_argument("forward_batch: training with dropout needs an RNG");
  }
  if (trace != nullptr) {
    trace->layers.assign(static_cast<std::size_t>(net.num_layers()), LayerTrace{});
    trace->steps = steps;
    trace->batch = batch;
  }

  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * batch;
  // Sequence values become a 1 x steps*batch row, timestep-major blocks.
  Eigen::MatrixXd x(1, cols);
  for (int t = 0; t < steps; ++t) {
    x.block(0, static_cast<Eigen::Index>(t) * batch, 1, batch) = inputs.row(t);
  }

  const double keep = 1.0 - net.dropout_rate;
  for (int l = 0; l < net.num_layers(); ++l) {
    const BiGruLayer& layer = net.layers[static_cast<std::size_t>(l)];
    LayerTrace* lt = trace != nullptr ? &trace->layers[static_cast<std::size_t>(l)] : nullptr;

    Eigen::MatrixXd x_rev = reverse_blocks(x, steps, batch);
    Eigen::MatrixXd h_fwd =
        direction_forward(layer.fwd, x, steps, batch, lt != nullptr ? &lt->fwd : nullptr);
    Eigen::MatrixXd h_bwd =
        direction_forward(layer.bwd, x_rev, steps, batch, lt != nullptr ? &lt->bwd : nullptr);

    Eigen::MatrixXd merged(net.hidden_size, cols);
    for (int t = 0; t < steps; ++t) {
      merged.middleCols(static_cast<Eigen::Index>(t) * batch, batch) =
          h_fwd.middleCols(static_cast<Eigen::Index>(t) * batch, batch) +
          h_bwd.middleCols(static_cast<Eigen::Index>(steps - 1 - t) * batch, batch);
    }

    if (use_dropout) {
      Eigen::MatrixXd mask(net.hidden_size, cols);
      const double scale = 1.0 / keep;
      double* data = mask.data();
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        data[i] = dropout_rng->uniform() < keep ? scale : 0.0;
      }
      merged.array() *= mask.array();
      if (lt != nullptr) lt->mask = std::move(mask);
    }

    if (lt != nullptr) {
      lt->input = x;
      lt->input_rev = std::move(x_rev);
    }
    if (layer.has_residual) {
      x += merged;
    } else {
      x = std::move(merged);
    }
  }

  // Average pooling over the hidden dimension gives one value per timestep.
  Eigen::MatrixXd out(steps, batch);
  for (int t = 0; t < steps; ++t) {
    out.row(t) = x.middleCols(static_cast<Eigen::Index>(t) * batch, batch).colwise().mean();
  }
  return out;
}

GruNetwork network_backward(const GruNetwork& net, const ForwardTrace& trace,
                            const Eigen::MatrixXd& d_output) {
  if (trace.layers.size() != static_cast<std::size_t>(net.num_layers())) {
    throw std::invalid_argument("network_backward: trace does not match the network");
  }
  const int steps = trace.steps;
  const int batch = trace.batch;
  if (d_output.rows() != steps || d_output.cols() != batch) {
    throw std::invalid_argument("network_backward: d_output shape mismatch");
  }
  const int h_dim = net.hidden_size;
  const Eigen::Index cols = static_cast<Eigen::Index>(steps) * batch;

  GruNetwork grads = make_zeros_like(net);

  // Pooling spreads each output gradient uniformly over the hidden rows.
  Eigen::MatrixXd dx(h_dim, cols);
  const double inv_h = 1.0 / static_cast<double>(h_dim);
  for (int t = 0; t < steps; ++t) {
    dx.middleCols(static_cast<Eigen::Index>(t) * batch, batch) =
        (d_output.row(t) * inv_h).replicate(h_dim, 1);
  }

  for (int l = net.num_layers() - 1; l >= 0; --l) {
    const BiGruLayer& layer = net.layers[static_cast<std::size_t>(l)];
    const LayerTrace& lt = trace.layers[static_cast<std::size_t>(l)];
    BiGruLayer& glayer = grads.layers[static_cast<std::size_t>(l)];

    Eigen::MatrixXd dmerged = lt.mask.size() != 0 ? dx.cwiseProduct(lt.mask).eval() : dx;

    const int in_dim = layer.fwd.input_dim();
    Eigen::MatrixXd dx_in;
    if (layer.has_residual) {
      dx_in = dx;  // identity path of the residual connection
    } else {
      dx_in = Eigen::MatrixXd::Zero(in_dim, cols);
    }

    direction_backward(layer.fwd, lt.fwd, lt.input, dmerged, glayer.fwd, dx_in);

    Eigen::MatrixXd dmerged_rev = reverse_blocks(dmerged, steps, batch);
    Eigen::MatrixXd dx_rev = Eigen::MatrixXd::Zero(in_dim, cols);
    direction_backward(layer.bwd, lt.bwd, lt.input_rev, dmerged_rev, glayer.bwd, dx_rev);
    dx_in += reverse_blocks(dx_rev, steps, batch);

    dx = std::move(dx_in);
  }
  return grads;
}

std::vector<double> network_forward(const GruNetwork& net, std::span<const double> input,
                                    RunMode mode, Rng* dropout_rng, ForwardTrace* trace) {
  if (input.size() != static_cast<std::size_t>(net.seq_len)) {
    throw std::invalid_argument("network_forward: input length must equal seq_len");
  }
  Eigen::MatrixXd in(net.seq_len, 1);
  for (int t = 0; t < net.seq_len; ++t) {
    in(t, 0) = input[static_cast<std::size_t>(t)];
  }
  const Eigen::MatrixXd out = forward_batch(net, in, mode, dropout_rng, trace);
  std::vector<double> result(static_cast<std::size_t>(net.seq_len));
  for (int t = 0; t < net.seq_len; ++t) {
    result[static_cast<std::size_t>(t)] = out(t, 0);
  }
  return result;
}

double sum_squared_error(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) {
    throw std::invalid_argument("sum_squared_error: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y_hat[i] - y[i];
    acc += d * d;
  }
  return acc;
}

std::vector<TensorRef> tensor_table(GruNetwork& net) {
  std::vector<TensorRef> refs;
  for (int l = 0; l < net.num_layers(); ++l) {
    for (int dir = 0; dir < 2; ++dir) {
      GruCellParams& p =
          dir == 0 ? net.layers[static_cast<std::size_t>(l)].fwd
                   : net.layers[static_cast<std::size_t>(l)].bwd;
      const std::string prefix =
          "layer" + std::to_string(l) + (dir == 0 ? ".fwd." : ".bwd.");
      auto add_matrix = [&](const char* name, Eigen::MatrixXd& m) {
        refs.push_back(TensorRef{prefix + name, m.data(), m.rows(), m.cols()});
      };
      auto add_vector = [&](const char* name, Eigen::VectorXd& v) {
        refs.push_back(TensorRef{prefix + name, v.data(), v.rows(), 1});
      };
      add_matrix("w_update", p.w_update);
      add_matrix("w_reset", p.w_reset);
      add_matrix("w_cand", p.w_cand);
      add_matrix("u_update", p.u_update);
      add_matrix("u_reset", p.u_reset);
      add_matrix("u_cand", p.u_cand);
      add_vector("b_update", p.b_update);
      add_vector("b_reset", p.b_reset);
      add_vector("b_cand", p.b_cand);
    }
  }
  return refs;
}

}  // namespace rim::nn
