#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracle_helpers.hpp"
#include "rim/errors.hpp"
#include "rim/nn/checkpoint.hpp"
#include "rim/nn/gru.hpp"
#include "rim/nn/optim.hpp"
#include "rim/rng.hpp"

using namespace rim;
using namespace rim::nn;

namespace {

Eigen::VectorXd random_vector(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

std::vector<double> random_sequence(int n, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Loss and analytic gradients for a fixed (input, target) pair, dropout off.
double forward_loss(const GruNetwork& net, const std::vector<double>& input,
                    const std::vector<double>& target) {
  const std::vector<double> out = network_forward(net, input, RunMode::kInference);
  return sum_squared_error(out, target);
}

GruNetwork analytic_grads(const GruNetwork& net, const std::vector<double>& input,
                          const std::vector<double>& target) {
  Eigen::MatrixXd in(net.seq_len, 1);
  for (int t = 0; t < net.seq_len; ++t) in(t, 0) = input[static_cast<std::size_t>(t)];
  ForwardTrace trace;
  const Eigen::MatrixXd out = forward_batch(net, in, RunMode::kTraining, nullptr, &trace);
  Eigen::MatrixXd d_out(net.seq_len, 1);
  for (int t = 0; t < net.seq_len; ++t) {
    d_out(t, 0) = 2.0 * (out(t, 0) - target[static_cast<std::size_t>(t)]);
  }
  return network_backward(net, trace, d_out);
}

}  // namespace

TEST_CASE("gru cell with zero parameters and zero state") {
  const GruCellParams p = GruCellParams::zeros(5, 3);
  GruCellCache cache;
  const Eigen::VectorXd h =
      gru_cell_step(p, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(5), &cache);
  for (int i = 0; i < 5; ++i) {
    CHECK(cache.update(i) == doctest::Approx(0.5));
    CHECK(cache.reset(i) == doctest::Approx(0.5));
    CHECK(cache.cand(i) == 0.0);
    CHECK(h(i) == 0.0);
  }
}

TEST_CASE("gru cell from a zero previous state blends only the candidate") {
  Rng rng(21);
  GruCellParams p = GruCellParams::zeros(4, 2);
  auto fill = [&rng](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1, 1);
  };
  auto fillv = [&rng](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(-1, 1);
  };
  fill(p.w_update); fill(p.w_reset); fill(p.w_cand);
  fill(p.u_update); fill(p.u_reset); fill(p.u_cand);
  fillv(p.b_update); fillv(p.b_reset); fillv(p.b_cand);

  GruCellCache cache;
  const Eigen::VectorXd h =
      gru_cell_step(p, random_vector(2, rng), Eigen::VectorXd::Zero(4), &cache);
  for (int i = 0; i < 4; ++i) {
    CHECK(h(i) == doctest::Approx(cache.update(i) * cache.cand(i)).epsilon(1e-15));
  }
}

TEST_CASE("gru cell matches a scalar-loop oracle") {
  Rng rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    GruNetwork net = make_network(4, 1, 1, 0.0, 100 + static_cast<std::uint64_t>(trial));
    // Borrow the initialized forward cell; feed random state and input.
    GruCellParams& p = net.layers[0].fwd;
    // The first layer is 1-input; widen by hand for a (H=4, D=3) case.
    p.w_update = Eigen::MatrixXd::Random(4, 3);
    p.w_reset = Eigen::MatrixXd::Random(4, 3);
    p.w_cand = Eigen::MatrixXd::Random(4, 3);

    const Eigen::VectorXd x = random_vector(3, rng);
    const Eigen::VectorXd h_prev = random_vector(4, rng);
    const Eigen::VectorXd h = gru_cell_step(p, x, h_prev);

    const std::vector<double> h_oracle = oracle::scalar_gru_step(
        p, std::vector<double>(x.data(), x.data() + 3),
        std::vector<double>(h_prev.data(), h_prev.data() + 4));
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(h(i) - h_oracle[static_cast<std::size_t>(i)]) < 1e-12);
    }
  }
}

TEST_CASE("gru cell rejects shape mismatches") {
  const GruCellParams p = GruCellParams::zeros(4, 2);
  CHECK_THROWS_AS(gru_cell_step(p, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(gru_cell_step(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(5)),
                  std::invalid_argument);
}

TEST_CASE("network forward matches the unbatched reference implementation") {
  Rng rng(23);
  for (const auto& [hidden, layers, steps] :
       {std::tuple{8, 2, 16}, std::tuple{4, 3, 9}, std::tuple{6, 1, 12}}) {
    const GruNetwork net = make_network(hidden, layers, steps, 0.0,
                                        static_cast<std::uint64_t>(hidden * 1000 + layers));
    const std::vector<double> input = random_sequence(steps, rng);
    const std::vector<double> fast = network_forward(net, input, RunMode::kInference);
    const std::vector<double> slow = oracle::reference_forward(net, input);
    for (int t = 0; t < steps; ++t) {
      CHECK(std::abs(fast[static_cast<std::size_t>(t)] - slow[static_cast<std::size_t>(t)]) <
            1e-12);
    }
  }
}

TEST_CASE("batched forward agrees with per-sequence forward") {
  Rng rng(24);
  const GruNetwork net = make_network(6, 2, 10, 0.0, 77);
  Eigen::MatrixXd batch(10, 3);
  std::vector<std::vector<double>> sequences;
  for (int b = 0; b < 3; ++b) {
    sequences.push_back(random_sequence(10, rng));
    for (int t = 0; t < 10; ++t) batch(t, b) = sequences.back()[static_cast<std::size_t>(t)];
  }
  const Eigen::MatrixXd out = forward_batch(net, batch, RunMode::kInference);
  for (int b = 0; b < 3; ++b) {
    const std::vector<double> single =
        network_forward(net, sequences[static_cast<std::size_t>(b)], RunMode::kInference);
    for (int t = 0; t < 10; ++t) {
      CHECK(std::abs(out(t, b) - single[static_cast<std::size_t>(t)]) < 1e-12);
    }
  }
}

TEST_CASE("time-reversed input with swapped directions reverses the output") {
  Rng rng(25);
  GruNetwork net = make_network(5, 1, 14, 0.0, 31);
  GruNetwork swapped = net;
  std::swap(swapped.layers[0].fwd, swapped.layers[0].bwd);

  const std::vector<double> input = random_sequence(14, rng);
  std::vector<double> reversed(input.rbegin(), input.rend());

  const std::vector<double> out = network_forward(net, input, RunMode::kInference);
  const std::vector<double> out_rev = network_forward(swapped, reversed, RunMode::kInference);
  for (int t = 0; t < 14; ++t) {
    CHECK(out[static_cast<std::size_t>(t)] ==
          doctest::Approx(out_rev[static_cast<std::size_t>(13 - t)]).epsilon(1e-12));
  }
}

TEST_CASE("zero dropout makes training and inference modes identical") {
  Rng rng(26);
  Rng mask_rng(99);
  const GruNetwork net = make_network(6, 2, 12, 0.0, 41);
  const std::vector<double> input = random_sequence(12, rng);
  const std::vector<double> a = network_forward(net, input, RunMode::kInference);
  const std::vector<double> b = network_forward(net, input, RunMode::kTraining, &mask_rng);
  CHECK(a == b);
}

TEST_CASE("a single timestep composes one forward and one backward cell step") {
  Rng rng(27);
  const GruNetwork net = make_network(5, 1, 1, 0.0, 55);
  const std::vector<double> input{0.37};
  const std::vector<double> out = network_forward(net, input, RunMode::kInference);

  Eigen::VectorXd x(1);
  x(0) = 0.37;
  const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd fwd = gru_cell_step(net.layers[0].fwd, x, h0);
  const Eigen::VectorXd bwd = gru_cell_step(net.layers[0].bwd, x, h0);
  CHECK(out[0] == doctest::Approx((fwd + bwd).mean()).epsilon(1e-14));
}

TEST_CASE("a zeroed deeper layer is an exact identity and deeper stacks pool the same") {
  Rng rng(28);
  GruNetwork net = make_network(6, 3, 11, 0.0, 61);
  // Zero every tensor of layers 2 and 3: their bidirectional outputs vanish
  // and the residual connection must carry the input through untouched.
  for (int l = 1; l < 3; ++l) {
    BiGruLayer& layer = net.layers[static_cast<std::size_t>(l)];
    for (GruCellParams* p : {&layer.fwd, &layer.bwd}) {
      p->w_update.setZero(); p->w_reset.setZero(); p->w_cand.setZero();
      p->u_update.setZero(); p->u_reset.setZero(); p->u_cand.setZero();
      p->b_update.setZero(); p->b_reset.setZero(); p->b_cand.setZero();
    }
  }
  GruNetwork shallow = make_network(6, 1, 11, 0.0, 61);
  shallow.layers[0] = net.layers[0];

  const std::vector<double> input = random_sequence(11, rng);
  const std::vector<double> deep_out = network_forward(net, input, RunMode::kInference);
  const std::vector<double> shallow_out = network_forward(shallow, input, RunMode::kInference);
  CHECK(deep_out == shallow_out);
}

TEST_CASE("average pooling passes constant hidden columns through") {
  // Recurrent weights zero and a saturating update gate make every hidden
  // unit equal tanh(w x + b): each timestep's hidden column is constant and
  // the pooled output must equal that constant.
  GruNetwork net = make_network(7, 1, 9, 0.0, 3);
  BiGruLayer& layer = net.layers[0];
  for (GruCellParams* p : {&layer.fwd, &layer.bwd}) {
    p->u_update.setZero(); p->u_reset.setZero(); p->u_cand.setZero();
    p->w_update.setZero(); p->w_reset.setZero();
    p->w_cand.setOnes();
    p->b_update.setConstant(50.0);  // update gate pinned at 1
    p->b_reset.setZero();
    p->b_cand.setZero();
  }
  std::vector<double> input{0.3, -0.9, 0.05, 0.61, -0.33, 0.0, 0.77, -0.2, 0.5};
  const std::vector<double> out = network_forward(net, input, RunMode::kInference);
  for (int t = 0; t < 9; ++t) {
    CHECK(out[static_cast<std::size_t>(t)] ==
          doctest::Approx(2.0 * std::tanh(input[static_cast<std::size_t>(t)])).epsilon(1e-12));
  }

  // Perturbing timestep j changes the pooled output only at j.
  std::vector<double> perturbed = input;
  perturbed[4] += 0.25;
  const std::vector<double> out2 = network_forward(net, perturbed, RunMode::kInference);
  for (int t = 0; t < 9; ++t) {
    if (t == 4) {
      CHECK(out2[static_cast<std::size_t>(t)] != out[static_cast<std::size_t>(t)]);
    } else {
      CHECK(out2[static_cast<std::size_t>(t)] == out[static_cast<std::size_t>(t)]);
    }
  }
}

TEST_CASE("sum of squared errors: closed-form cases") {
  std::vector<double> y{1.0, 2.0, 3.0};
  CHECK(sum_squared_error(y, y) == 0.0);
  std::vector<double> y2{1.0, 2.5, 3.0};
  CHECK(sum_squared_error(y, y2) == doctest::Approx(0.25));
  CHECK(sum_squared_error(y, y2) == sum_squared_error(y2, y));
  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(sum_squared_error(y, shorter), std::invalid_argument);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(31);
  const GruNetwork base = make_network(4, 2, 8, 0.0, 71);
  const std::vector<double> input = random_sequence(8, rng);
  const std::vector<double> target = random_sequence(8, rng);

  const GruNetwork grads = analytic_grads(base, input, target);

  GruNetwork probe = base;
  std::vector<TensorRef> params = tensor_table(probe);
  GruNetwork grads_copy = grads;
  std::vector<TensorRef> gref = tensor_table(grads_copy);

  const double step = 1e-5;
  int checked = 0;
  for (std::size_t ti = 0; ti < params.size(); ++ti) {
    // Probe a few coordinates of every tensor.
    for (std::ptrdiff_t k = 0; k < params[ti].size(); k += std::max<std::ptrdiff_t>(1, params[ti].size() / 3)) {
      const double saved = params[ti].data[k];
      params[ti].data[k] = saved + step;
      const double up = forward_loss(probe, input, target);
      params[ti].data[k] = saved - step;
      const double down = forward_loss(probe, input, target);
      params[ti].data[k] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double analytic = gref[ti].data[k];
      const double rel = std::abs(analytic - fd) /
                         std::max({std::abs(analytic), std::abs(fd), 1e-6});
      CHECK(rel < 1e-4);
      ++checked;
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("zero upstream gradient produces zero parameter gradients") {
  const GruNetwork net = make_network(5, 2, 7, 0.0, 81);
  Eigen::MatrixXd in = Eigen::MatrixXd::Random(7, 2);
  ForwardTrace trace;
  forward_batch(net, in, RunMode::kTraining, nullptr, &trace);
  GruNetwork grads = network_backward(net, trace, Eigen::MatrixXd::Zero(7, 2));
  for (const TensorRef& ref : tensor_table(grads)) {
    for (std::ptrdiff_t i = 0; i < ref.size(); ++i) CHECK(ref.data[i] == 0.0);
  }
}

TEST_CASE("a zeroed residual layer is gradient-transparent to the layer below") {
  Rng rng(32);
  GruNetwork deep = make_network(4, 2, 6, 0.0, 91);
  for (GruCellParams* p : {&deep.layers[1].fwd, &deep.layers[1].bwd}) {
    p->w_update.setZero(); p->w_reset.setZero(); p->w_cand.setZero();
    p->u_update.setZero(); p->u_reset.setZero(); p->u_cand.setZero();
    p->b_update.setZero(); p->b_reset.setZero(); p->b_cand.setZero();
  }
  GruNetwork shallow = make_network(4, 1, 6, 0.0, 91);
  shallow.layers[0] = deep.layers[0];

  const std::vector<double> input = random_sequence(6, rng);
  const std::vector<double> target = random_sequence(6, rng);
  GruNetwork g_deep = analytic_grads(deep, input, target);
  GruNetwork g_shallow = analytic_grads(shallow, input, target);

  // Layer-1 gradients must agree exactly: the zeroed layer contributes only
  // the identity path of its residual connection.
  GruNetwork g_deep_l1 = shallow;
  g_deep_l1.layers[0] = g_deep.layers[0];
  std::vector<TensorRef> a = tensor_table(g_deep_l1);
  std::vector<TensorRef> b = tensor_table(g_shallow);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < a[i].size(); ++k) {
      CHECK(a[i].data[k] == b[i].data[k]);
    }
  }
}

TEST_CASE("gradient clipping rescales only above the threshold") {
  GruNetwork grads = make_network(3, 1, 4, 0.0, 7);  // random values stand in for grads
  GruNetwork copy = grads;
  const double norm = global_grad_norm(grads);

  // Below the threshold: untouched.
  CHECK(clip_gradients(grads, norm * 2.0) == doctest::Approx(norm));
  std::vector<TensorRef> after = tensor_table(grads);
  std::vector<TensorRef> before = tensor_table(copy);
  for (std::size_t i = 0; i < after.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < after[i].size(); ++k) {
      CHECK(after[i].data[k] == before[i].data[k]);
    }
  }

  // Exactly twice the threshold: halved, new norm equals the threshold.
  const double clip = norm / 2.0;
  CHECK(clip_gradients(grads, clip) == doctest::Approx(norm));
  CHECK(global_grad_norm(grads) == doctest::Approx(clip).epsilon(1e-12));
  for (std::size_t i = 0; i < after.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < after[i].size(); ++k) {
      CHECK(after[i].data[k] == doctest::Approx(before[i].data[k] / 2.0).epsilon(1e-12));
      // Direction preserved: same sign, scaled by a positive factor.
      CHECK(after[i].data[k] * before[i].data[k] >= 0.0);
    }
  }
}

TEST_CASE("first Adam step moves by the learning rate against the gradient sign") {
  GruNetwork params = make_network(3, 1, 4, 0.0, 11);
  GruNetwork grads = make_zeros_like(params);
  tensor_table(grads)[0].data[0] = 5.0;  // single nonzero coordinate
  const double before = tensor_table(params)[0].data[0];

  TrainState state(params, AdamConfig{}, 1.0e9, 1);
  adam_step(state, params, grads);
  const double update = tensor_table(params)[0].data[0] - before;
  // Bias-corrected first step: -lr * g / (|g| + eps) for any g >> eps.
  CHECK(update == doctest::Approx(-1.0e-3 * 5.0 / (5.0 + 1.0e-8)).epsilon(1e-12));
}

TEST_CASE("Adam leaves parameters alone under a permanently zero gradient") {
  GruNetwork params = make_network(3, 1, 4, 0.0, 13);
  GruNetwork reference = params;
  GruNetwork zeros = make_zeros_like(params);
  TrainState state(params, AdamConfig{}, 1.0, 2);
  for (int i = 0; i < 25; ++i) adam_step(state, params, zeros);
  std::vector<TensorRef> a = tensor_table(params);
  std::vector<TensorRef> b = tensor_table(reference);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < a[i].size(); ++k) {
      CHECK(a[i].data[k] == b[i].data[k]);
    }
  }
}

TEST_CASE("Adam drives a scalar quadratic to its minimum") {
  // Minimize (w - 3)^2 / 2 through a single parameter coordinate and compare
  // against an independent scalar recurrence. The recurrence first reaches
  // |w - 3| < 1e-3 at step 6473 for the default learning rate.
  GruNetwork params = make_network(1, 1, 1, 0.0, 17);
  std::vector<TensorRef> table = tensor_table(params);
  TensorRef& w = table[0];
  w.data[0] = 0.0;
  GruNetwork grads = make_zeros_like(params);
  TrainState state(params, AdamConfig{}, 1.0e9, 3);

  double w_ref = 0.0, m = 0.0, v = 0.0;
  int first_converged = 0;
  for (int step = 1; step <= 6500; ++step) {
    tensor_table(grads)[0].data[0] = w.data[0] - 3.0;
    adam_step(state, params, grads);

    const double g = w_ref - 3.0;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double m_hat = m / (1.0 - std::pow(0.9, step));
    const double v_hat = v / (1.0 - std::pow(0.999, step));
    w_ref -= 1.0e-3 * m_hat / (std::sqrt(v_hat) + 1.0e-8);

    CHECK(std::abs(w.data[0] - w_ref) < 1e-9);
    if (first_converged == 0 && std::abs(w.data[0] - 3.0) < 1e-3) {
      first_converged = step;
    }
  }
  CHECK(first_converged == 6473);
  CHECK(std::abs(w.data[0] - 3.0) < 1e-3);
}

TEST_CASE("checkpoint save/load round-trips parameters bit-exactly") {
  const GruNetwork net = make_network(6, 3, 32, 0.25, 19);
  const std::string bytes = save_network_bytes(net);
  const GruNetwork loaded = load_network_bytes(bytes);

  CHECK(loaded.hidden_size == 6);
  CHECK(loaded.num_layers() == 3);
  CHECK(loaded.seq_len == 32);
  CHECK(loaded.dropout_rate == 0.25);

  GruNetwork a = net, b = loaded;
  std::vector<TensorRef> ta = tensor_table(a), tb = tensor_table(b);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < ta[i].size(); ++k) {
      CHECK(ta[i].data[k] == tb[i].data[k]);
    }
  }
  // Serialization itself is deterministic.
  CHECK(save_network_bytes(loaded) == bytes);
}

TEST_CASE("truncated checkpoints raise the corrupt-blob error") {
  const GruNetwork net = make_network(4, 1, 8, 0.0, 23);
  const std::string bytes = save_network_bytes(net);
  for (std::size_t keep : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK_THROWS_AS(load_network_bytes(bytes.substr(0, keep)), CheckpointCorruptError);
  }
}

TEST_CASE("a flipped blob byte fails the checksum") {
  const GruNetwork net = make_network(4, 1, 8, 0.0, 29);
  std::string bytes = save_network_bytes(net);
  bytes[bytes.size() - 16] ^= 0x40;  // inside the weight blob
  CHECK_THROWS_AS(load_network_bytes(bytes), CheckpointCorruptError);
}

TEST_CASE("an altered architecture tag raises the version error") {
  const GruNetwork net = make_network(4, 1, 8, 0.0, 31);
  std::string bytes = save_network_bytes(net);
  const std::size_t pos = bytes.find("bigru");
  REQUIRE(pos != std::string::npos);
  bytes[pos] = 'x';  // same length, different tag
  CHECK_THROWS_AS(load_network_bytes(bytes), CheckpointVersionError);
}

TEST_CASE("an inconsistent tensor shape raises the shape error") {
  const GruNetwork net = make_network(4, 1, 8, 0.0, 37);
  std::string bytes = save_network_bytes(net);
  const std::size_t pos = bytes.find("\"rows\":4");
  REQUIRE(pos != std::string::npos);
  bytes[pos + 7] = '5';  // claim a 5-row tensor the blob cannot satisfy
  CHECK_THROWS_AS(load_network_bytes(bytes), CheckpointShapeError);
}

TEST_CASE("container version mismatches raise the version error") {
  const GruNetwork net = make_network(4, 1, 8, 0.0, 41);
  std::string bytes = save_network_bytes(net);
  bytes[4] = 9;  // container version field follows the magic
  CHECK_THROWS_AS(load_network_bytes(bytes), CheckpointVersionError);
}

TEST_CASE("inverted dropout is unbiased: mask average matches inference") {
  const GruNetwork net = make_network(8, 1, 6, 0.3, 43);
  Eigen::MatrixXd in = Eigen::MatrixXd::Random(6, 1);
  const Eigen::MatrixXd reference = forward_batch(net, in, RunMode::kInference);

  Rng rng(4242);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(6, 1);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    mean += forward_batch(net, in, RunMode::kTraining, &rng);
  }
  mean /= static_cast<double>(draws);
  const double scale = reference.cwiseAbs().maxCoeff();
  for (int t = 0; t < 6; ++t) {
    CHECK(std::abs(mean(t, 0) - reference(t, 0)) <= 0.02 * std::max(scale, 0.05));
  }
}

TEST_CASE("training mode with dropout varies across draws, inference never does") {
  const GruNetwork net = make_network(8, 2, 6, 0.3, 47);
  Eigen::MatrixXd in = Eigen::MatrixXd::Random(6, 1);
  Rng rng(5);
  const Eigen::MatrixXd a = forward_batch(net, in, RunMode::kTraining, &rng);
  const Eigen::MatrixXd b = forward_batch(net, in, RunMode::kTraining, &rng);
  CHECK((a - b).cwiseAbs().maxCoeff() > 0.0);

  const Eigen::MatrixXd c = forward_batch(net, in, RunMode::kInference);
  const Eigen::MatrixXd d = forward_batch(net, in, RunMode::kInference);
  CHECK((c - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("network initialization is deterministic and bounded") {
  const GruNetwork a = make_network(10, 2, 16, 0.1, 1234);
  const GruNetwork b = make_network(10, 2, 16, 0.1, 1234);
  GruNetwork ma = a, mb = b;
  std::vector<TensorRef> ta = tensor_table(ma), tb = tensor_table(mb);
  const double bound = 1.0 / std::sqrt(10.0);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::ptrdiff_t k = 0; k < ta[i].size(); ++k) {
      CHECK(ta[i].data[k] == tb[i].data[k]);
      CHECK(std::abs(ta[i].data[k]) <= bound);
    }
  }
}

TEST_CASE("bilayer output reverses when input and directions are both reversed") {
  Rng rng(61);
  const GruNetwork net = make_network(5, 1, 1, 0.0, 611);
  BiGruLayer layer = net.layers[0];
  BiGruLayer swapped{layer.bwd, layer.fwd, false};

  Eigen::MatrixXd input(1, 13);
  for (int t = 0; t < 13; ++t) input(0, t) = rng.uniform(-1, 1);
  Eigen::MatrixXd reversed = input.rowwise().reverse();

  const Eigen::MatrixXd out = bilayer_forward(layer, input, RunMode::kInference);
  const Eigen::MatrixXd out_rev = bilayer_forward(swapped, reversed, RunMode::kInference);
  for (int t = 0; t < 13; ++t) {
    for (int i = 0; i < 5; ++i) {
      CHECK(out(i, t) == doctest::Approx(out_rev(i, 12 - t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("bilayer training mode equals inference mode at zero dropout") {
  const GruNetwork net = make_network(4, 1, 1, 0.0, 612);
  Eigen::MatrixXd input = Eigen::MatrixXd::Random(1, 9);
  Rng rng(1);
  const Eigen::MatrixXd a = bilayer_forward(net.layers[0], input, RunMode::kInference);
  const Eigen::MatrixXd b = bilayer_forward(net.layers[0], input, RunMode::kTraining, 0.0, &rng);
  CHECK(a == b);
}

TEST_CASE("a one-step bilayer is the sum of two independent cell steps") {
  const GruNetwork net = make_network(6, 1, 1, 0.0, 613);
  Eigen::MatrixXd input(1, 1);
  input(0, 0) = -0.42;
  const Eigen::MatrixXd out = bilayer_forward(net.layers[0], input, RunMode::kInference);

  Eigen::VectorXd x(1);
  x(0) = -0.42;
  const Eigen::VectorXd h0 = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd expected = gru_cell_step(net.layers[0].fwd, x, h0) +
                                   gru_cell_step(net.layers[0].bwd, x, h0);
  for (int i = 0; i < 6; ++i) {
    CHECK(out(i, 0) == doctest::Approx(expected(i)).epsilon(1e-14));
  }
}

TEST_CASE("bilayer dropout masks scale surviving activations by 1/(1-p)") {
  const GruNetwork net = make_network(4, 1, 1, 0.5, 614);
  Eigen::MatrixXd input = Eigen::MatrixXd::Random(1, 20);
  const Eigen::MatrixXd base = bilayer_forward(net.layers[0], input, RunMode::kInference);
  Rng rng(7);
  const Eigen::MatrixXd dropped =
      bilayer_forward(net.layers[0], input, RunMode::kTraining, 0.5, &rng);
  int zeros = 0, scaled = 0;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    if (dropped.data()[i] == 0.0) {
      ++zeros;
    } else {
      CHECK(dropped.data()[i] == doctest::Approx(2.0 * base.data()[i]).epsilon(1e-12));
      ++scaled;
    }
  }
  CHECK(zeros > 10);
  CHECK(scaled > 10);
}
