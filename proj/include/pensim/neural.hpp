#ifndef PENSIM_NEURAL_HPP
#define PENSIM_NEURAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "pensim/errors.hpp"
#include "pensim/rng.hpp"

namespace pensim {

// Geometry of the dense extrapolation cell: K layers z_0..z_{K-1} with
// dimensions D_0 = N (input window), D_1..D_{K-2} = H, D_{K-1} = 1. Hidden
// layers use ReLU, the output layer is the identity.
struct CellSpec {
  int input_size = 1;   // N
  int depth = 2;        // K, counting input and output layers
  int hidden_width = 1; // H

  void validate() const {
    if (depth < 2 || input_size < 1 || hidden_width < 1) {
      throw InvalidSpec("cell spec requires K >= 2, N >= 1, H >= 1");
    }
  }

  std::vector<int> layer_dims() const {
    std::vector<int> d(depth);
    d[0] = input_size;
    for (int k = 1; k < depth - 1; ++k) d[k] = hidden_width;
    d[depth - 1] = 1;
    return d;
  }

  // Total number of weights and biases.
  long parameter_count() const {
    const auto d = layer_dims();
    long n = 0;
    for (int k = 1; k < depth; ++k) n += static_cast<long>(d[k]) * d[k - 1] + d[k];
    return n;
  }

  bool operator==(const CellSpec&) const = default;
};

// Weights and biases; weights[k] maps layer k to layer k+1. Plain value
// type: copying gives an independent model.
struct DenseCell {
  CellSpec spec;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
  bool all_finite() const;
};

Gradients zero_gradients(const CellSpec& spec);

// One training example: an input window of N log-rates and the next
// N_train observed log-rates.
struct TrainingPair {
  Eigen::VectorXd input;
  Eigen::VectorXd target;
};

// All bias elements are set to b_init; weights are drawn i.i.d. from
// N(0, sigma_init) truncated at two standard deviations by redraw. Draw
// order is fixed (layers in order, row-major within a matrix), so a seed
// pins the cell bit-for-bit.
DenseCell init_cell(const CellSpec& spec, double b_init, double sigma_init,
                    std::uint64_t seed);

// Single application of the cell. The ReLU subgradient at exactly 0 is 0.
double forward(const DenseCell& cell, const Eigen::VectorXd& input);

// Recursive extrapolation: each prediction is appended to the window and the
// oldest entry dropped. Returns k predicted log-rates.
std::vector<double> rollout(const DenseCell& cell, const Eigen::VectorXd& input, int steps);

// Mean over the batch of the squared Euclidean distance between the
// N_train-step rollout and the target vector.
double loss(const DenseCell& cell, std::span<const TrainingPair> batch);

// Exact gradient of `loss` by backpropagation through time: contributions
// flow through the re-fed predictions. `through_recursion = false` is the
// stop-gradient ablation that treats re-fed predictions as constants.
// `batch_loss`, when given, receives the loss of the same forward sweep.
Gradients backward(const DenseCell& cell, std::span<const TrainingPair> batch,
                   bool through_recursion = true, double* batch_loss = nullptr);

struct RmsPropState {
  std::vector<Eigen::MatrixXd> acc_weights;  // squared-gradient accumulators
  std::vector<Eigen::VectorXd> acc_biases;
  double learning_rate = 1e-4;
  double decay = 0.9;      // rho
  double epsilon = 1e-10;
};

RmsPropState init_rmsprop(const CellSpec& spec, double learning_rate, double decay = 0.9,
                          double epsilon = 1e-10);

// a <- rho a + (1-rho) g^2;  p <- p - alpha g / (sqrt(a) + eps), elementwise.
void rmsprop_step(RmsPropState& state, DenseCell& cell, const Gradients& g);

// Rollout outputs together with exact derivatives of every output with
// respect to the N window entries and to every earlier output (total
// derivatives through all recursion paths). Column m < N is input xi_m;
// column N+j is rollout output j. Entries for sources at or after the row's
// own step are zero.
struct RolloutJacobian {
  std::vector<double> outputs;  // length k
  Eigen::MatrixXd jacobian;     // k x (N + k)
};

RolloutJacobian rollout_jacobian(const DenseCell& cell, const Eigen::VectorXd& input,
                                 int steps);

// Derivatives of the k rollout outputs with respect to the input window
// only (the first N columns of rollout_jacobian).
Eigen::MatrixXd input_jacobian(const DenseCell& cell, const Eigen::VectorXd& input,
                               int steps);

}  // namespace pensim

#endif  // PENSIM_NEURAL_HPP
