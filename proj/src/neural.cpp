#include "pensim/neural.hpp"

#include <cmath>

namespace pensim {

namespace {

// Activations of one cell application, kept for the backward pass.
struct ForwardTrace {
  std::vector<Eigen::VectorXd> z;  // z[0] = input, z[K-1] = output
};

double forward_traced(const DenseCell& cell, const Eigen::VectorXd& input,
                      ForwardTrace* trace) {
  const int K = cell.spec.depth;
  if (input.size() != cell.spec.input_size) {
    throw ShapeMismatch("forward: input size " + std::to_string(input.size()) +
                        " != N = " + std::to_string(cell.spec.input_size));
  }
  Eigen::VectorXd z = input;
  if (trace) {
    trace->z.clear();
    trace->z.reserve(K);
    trace->z.push_back(z);
  }
  for (int k = 0; k < K - 1; ++k) {
    Eigen::VectorXd a = cell.weights[k] * z + cell.biases[k];
    if (k < K - 2) a = a.cwiseMax(0.0);  // ReLU on hidden layers
    z = std::move(a);
    if (trace) trace->z.push_back(z);
  }
  return z(0);
}

// Backpropagates a scalar seed through one traced cell application.
// Accumulates parameter gradients into `g` and returns the gradient with
// respect to the input window.
Eigen::VectorXd backprop_cell(const DenseCell& cell, const ForwardTrace& trace,
                              double output_seed, Gradients& g) {
  const int K = cell.spec.depth;
  Eigen::VectorXd delta(1);
  delta(0) = output_seed;
  for (int k = K - 2; k >= 0; --k) {
    g.weights[k].noalias() += delta * trace.z[k].transpose();
    g.biases[k] += delta;
    Eigen::VectorXd prev = cell.weights[k].transpose() * delta;
    if (k > 0) {
      // ReLU mask: z[k] is the post-activation, zero exactly where the unit
      // was clamped (subgradient at 0 is 0).
      for (Eigen::Index i = 0; i < prev.size(); ++i) {
        if (trace.z[k](i) <= 0.0) prev(i) = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return delta;
}

}  // namespace

void Gradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

bool Gradients::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

Gradients zero_gradients(const CellSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  Gradients g;
  for (int k = 1; k < spec.depth; ++k) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(dims[k], dims[k - 1]));
    g.biases.emplace_back(Eigen::VectorXd::Zero(dims[k]));
  }
  return g;
}

DenseCell init_cell(const CellSpec& spec, double b_init, double sigma_init,
                    std::uint64_t seed) {
  spec.validate();
  if (!(b_init > 0.0) || !(sigma_init > 0.0)) {
    throw InvalidSpec("init_cell requires b_init > 0 and sigma_init > 0");
  }
  const auto dims = spec.layer_dims();
  Rng rng(seed);
  DenseCell cell;
  cell.spec = spec;
  for (int k = 1; k < spec.depth; ++k) {
    Eigen::MatrixXd w(dims[k], dims[k - 1]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.truncated_gaussian(sigma_init, 2.0);
      }
    }
    cell.weights.push_back(std::move(w));
    cell.biases.emplace_back(Eigen::VectorXd::Constant(dims[k], b_init));
  }
  return cell;
}

double forward(const DenseCell& cell, const Eigen::VectorXd& input) {
  return forward_traced(cell, input, nullptr);
}

std::vector<double> rollout(const DenseCell& cell, const Eigen::VectorXd& input, int steps) {
  if (steps < 1) throw ShapeMismatch("rollout requires at least one step");
  const int n = cell.spec.input_size;
  if (input.size() != n) {
    throw ShapeMismatch("rollout: input size " + std::to_string(input.size()) +
                        " != N = " + std::to_string(n));
  }
  Eigen::VectorXd window = input;
  std::vector<double> out;
  out.reserve(steps);
  for (int j = 0; j < steps; ++j) {
    const double y = forward(cell, window);
    out.push_back(y);
    if (n > 1) {
      window.head(n - 1) = window.tail(n - 1).eval();
    }
    window(n - 1) = y;
  }
  return out;
}

double loss(const DenseCell& cell, std::span<const TrainingPair> batch) {
  if (batch.empty()) throw EmptyBatch("loss over an empty batch");
  double total = 0.0;
  for (const auto& pair : batch) {
    const int t = static_cast<int>(pair.target.size());
    const auto outputs = rollout(cell, pair.input, t);
    for (int j = 0; j < t; ++j) {
      const double d = outputs[j] - pair.target(j);
      total += d * d;
    }
  }
  return total / static_cast<double>(batch.size());
}

Gradients backward(const DenseCell& cell, std::span<const TrainingPair> batch,
                   bool through_recursion, double* batch_loss) {
  if (batch.empty()) throw EmptyBatch("backward over an empty batch");
  const int n = cell.spec.input_size;
  Gradients g = zero_gradients(cell.spec);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;

  std::vector<ForwardTrace> traces;
  std::vector<double> outputs;
  std::vector<double> out_grads;
  for (const auto& pair : batch) {
    const int t = static_cast<int>(pair.target.size());
    if (t < 1) throw ShapeMismatch("empty target vector");

    // Forward rollout, keeping each step's activations.
    traces.assign(t, ForwardTrace{});
    outputs.assign(t, 0.0);
    Eigen::VectorXd window = pair.input;
    for (int j = 0; j < t; ++j) {
      outputs[j] = forward_traced(cell, window, &traces[j]);
      if (n > 1) window.head(n - 1) = window.tail(n - 1).eval();
      window(n - 1) = outputs[j];
    }

    // Reverse sweep. out_grads[j] collects the direct loss term plus, when
    // recursion gradients are on, every contribution from later windows in
    // which output j appeared.
    out_grads.assign(t, 0.0);
    for (int j = 0; j < t; ++j) {
      const double d = outputs[j] - pair.target(j);
      loss_sum += d * d;
      out_grads[j] = 2.0 * d * scale;
    }
    for (int j = t - 1; j >= 0; --j) {
      const Eigen::VectorXd d_window = backprop_cell(cell, traces[j], out_grads[j], g);
      if (!through_recursion) continue;
      // Window j holds sequence positions j..j+n-1; position n+p is output p.
      for (int m = 0; m < n; ++m) {
        const int pos = j + m;
        if (pos >= n) out_grads[pos - n] += d_window(m);
      }
    }
  }
  if (batch_loss) *batch_loss = loss_sum * scale;
  return g;
}

RmsPropState init_rmsprop(const CellSpec& spec, double learning_rate, double decay,
                          double epsilon) {
  spec.validate();
  if (!(learning_rate > 0.0)) throw InvalidSpec("learning rate must be positive");
  const auto dims = spec.layer_dims();
  RmsPropState s;
  s.learning_rate = learning_rate;
  s.decay = decay;
  s.epsilon = epsilon;
  for (int k = 1; k < spec.depth; ++k) {
    s.acc_weights.emplace_back(Eigen::MatrixXd::Zero(dims[k], dims[k - 1]));
    s.acc_biases.emplace_back(Eigen::VectorXd::Zero(dims[k]));
  }
  return s;
}

void rmsprop_step(RmsPropState& state, DenseCell& cell, const Gradients& g) {
  if (state.acc_weights.size() != cell.weights.size() ||
      g.weights.size() != cell.weights.size()) {
    throw ShapeMismatch("rmsprop state/cell/gradient layer counts differ");
  }
  const double rho = state.decay;
  const double alpha = state.learning_rate;
  const double eps = state.epsilon;
  for (std::size_t k = 0; k < cell.weights.size(); ++k) {
    if (g.weights[k].rows() != cell.weights[k].rows() ||
        g.weights[k].cols() != cell.weights[k].cols()) {
      throw ShapeMismatch("gradient shape mismatch at layer " + std::to_string(k));
    }
    auto& aw = state.acc_weights[k];
    aw = rho * aw.array() + (1.0 - rho) * g.weights[k].array().square();
    cell.weights[k].array() -= alpha * g.weights[k].array() / (aw.array().sqrt() + eps);

    auto& ab = state.acc_biases[k];
    ab = rho * ab.array() + (1.0 - rho) * g.biases[k].array().square();
    cell.biases[k].array() -= alpha * g.biases[k].array() / (ab.array().sqrt() + eps);
  }
}

RolloutJacobian rollout_jacobian(const DenseCell& cell, const Eigen::VectorXd& input,
                                 int steps) {
  if (steps < 1) throw ShapeMismatch("rollout requires at least one step");
  const int n = cell.spec.input_size;
  if (input.size() != n) throw ShapeMismatch("rollout_jacobian: wrong input size");

  RolloutJacobian result;
  result.outputs.reserve(steps);
  result.jacobian = Eigen::MatrixXd::Zero(steps, n + steps);

  // Forward mode: each window slot carries its sensitivity to all sources
  // (the N inputs and every output produced so far).
  Eigen::MatrixXd window_jac = Eigen::MatrixXd::Zero(n, n + steps);
  window_jac.topLeftCorner(n, n).setIdentity();
  Eigen::VectorXd window = input;

  ForwardTrace trace;
  Gradients scratch = zero_gradients(cell.spec);
  for (int j = 0; j < steps; ++j) {
    const double y = forward_traced(cell, window, &trace);
    result.outputs.push_back(y);

    scratch.set_zero();
    const Eigen::VectorXd d_window = backprop_cell(cell, trace, 1.0, scratch);
    result.jacobian.row(j) = d_window.transpose() * window_jac;

    if (n > 1) {
      window.head(n - 1) = window.tail(n - 1).eval();
      const Eigen::MatrixXd shifted = window_jac.bottomRows(n - 1);
      window_jac.topRows(n - 1) = shifted;
    }
    window(n - 1) = y;
    window_jac.row(n - 1) = result.jacobian.row(j);
    window_jac(n - 1, n + j) = 1.0;  // the new slot is itself a source
  }
  return result;
}

Eigen::MatrixXd input_jacobian(const DenseCell& cell, const Eigen::VectorXd& input,
                               int steps) {
  const auto rj = rollout_jacobian(cell, input, steps);
  return rj.jacobian.leftCols(cell.spec.input_size);
}

}  // namespace pensim
