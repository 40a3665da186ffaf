#pragma once

#include <span>
#include <vector>

#include "csib/matrix.hpp"

namespace csib {

// Which contributions count as "top": by absolute value (default; negative
// groups can dominate a prediction) or by signed value.
enum class TopkRule { kMagnitude, kSigned };

// Sparse affine output head. W maps group activations to outputs; the bias
// is set once from the training targets and never trained. k_set lists the
// sparsity levels averaged in the training loss and must contain the dense
// level K = Z so every group receives a learning signal.
struct OutputLayer {
  Matrix w;     // Y x Z
  Vector bias;  // Y, frozen
  std::vector<std::size_t> k_set;
  std::size_t k_eval = 0;
  TopkRule rule = TopkRule::kMagnitude;

  OutputLayer() = default;
  OutputLayer(std::size_t num_outputs, std::size_t num_groups);

  std::size_t num_outputs() const { return w.rows(); }
  std::size_t num_groups() const { return w.cols(); }

  void validate() const;
};

// One entry of the elementwise contribution matrix W o z.
struct Contribution {
  std::size_t group_index = 0;
  std::size_t output_index = 0;
  double value = 0.0;  // W_{y,i} * z_i
  bool kept = false;   // survived top-K
};

struct TopkResult {
  Vector y;
  std::vector<Contribution> contributions;  // all Y*Z entries, output-major
};

// Keep the K largest contributions per output row (per `layer.rule`, ties to
// the lower group index), zero the rest, sum in group-index order, add bias.
// K >= Z reproduces the dense affine map bitwise.
TopkResult topk_forward(std::span<const double> z, const OutputLayer& layer,
                        std::size_t k);

struct TopkBackwardResult {
  Vector d_z;  // Z
  Matrix d_w;  // Y x Z
};

// Straight-through convention: the selection mask is constant within the
// step, so gradients flow only through kept entries.
TopkBackwardResult topk_backward(std::span<const double> z,
                                 const OutputLayer& layer, std::size_t k,
                                 std::span<const double> upstream);

struct MultiKResult {
  double loss = 0.0;
  Vector d_z;
  Matrix d_w;
  // (k, per-output mean squared error at that k)
  std::vector<std::pair<std::size_t, double>> per_k;
};

// Mean over k in layer.k_set of the MSE between topk_forward(z, k) and the
// target.
MultiKResult multi_k_loss(std::span<const double> z, const OutputLayer& layer,
                          std::span<const double> target);

// bias <- per-output mean of the given targets; W <- all zeros.
void init_bias_from_targets(OutputLayer& layer,
                            const std::vector<Vector>& targets);

}  // namespace csib
