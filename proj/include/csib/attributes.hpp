#pragma once

#include <span>
#include <vector>

#include "csib/dataset.hpp"
#include "csib/matrix.hpp"

namespace csib {

// Linear-sigmoid multi-label classifier mapping feature vectors to attribute
// presence probabilities. Stands in for a full image backbone: the synthetic
// features are linear in the attributes, so this is all the capacity the
// bottleneck in front needs.
struct AttributePredictor {
  Matrix weights;  // A x F
  Vector bias;     // A

  AttributePredictor() = default;
  AttributePredictor(std::size_t num_attributes, std::size_t feature_dim)
      : weights(num_attributes, feature_dim), bias(num_attributes, 0.0) {}

  std::size_t num_attributes() const { return weights.rows(); }
  std::size_t feature_dim() const { return weights.cols(); }
};

// sigmoid(W x + b), elementwise in (0,1).
Vector predict_attributes(const AttributePredictor& p, std::span<const double> features);

struct BceResult {
  double loss = 0.0;       // mean over samples and attributes
  Matrix d_weights;        // A x F
  Vector d_bias;           // A
  // d loss / d features per batch sample, for end-to-end finetuning.
  std::vector<Vector> d_features;
};

// Binary cross entropy over every attribute-labeled sample in `batch`
// (indices into `ds`). Predictions are clamped to [1e-7, 1-1e-7] inside the
// log terms only; gradients are the analytic (a - y) form through the
// linear map.
BceResult bce_loss_and_grads(const AttributePredictor& p, const Dataset& ds,
                             std::span<const std::size_t> batch);

}  // namespace csib
