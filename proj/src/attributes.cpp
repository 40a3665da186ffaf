#include "csib/attributes.hpp"

#include <cmath>

#include "csib/util.hpp"

namespace csib {

namespace {

constexpr double kProbClamp = 1e-7;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Vector predict_attributes(const AttributePredictor& p,
                          std::span<const double> features) {
  require(features.size() == p.feature_dim(),
          "predict_attributes: feature dimension mismatch");
  Vector a = p.weights.matvec(features);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = sigmoid(a[j] + p.bias[j]);
  return a;
}

BceResult bce_loss_and_grads(const AttributePredictor& p, const Dataset& ds,
                             std::span<const std::size_t> batch) {
  require(!batch.empty(), "bce_loss_and_grads: empty batch");
  const std::size_t num_attrs = p.num_attributes();
  require(ds.attribute_dim == num_attrs,
          "bce_loss_and_grads: attribute dimension mismatch");

  BceResult res;
  res.d_weights = Matrix(num_attrs, p.feature_dim());
  res.d_bias.assign(num_attrs, 0.0);
  res.d_features.reserve(batch.size());

  const double denom = static_cast<double>(batch.size() * num_attrs);
  for (std::size_t idx : batch) {
    require(idx < ds.size(), "bce_loss_and_grads: sample index out of range");
    const SampleRecord& s = ds.samples[idx];
    require(s.attribute_labels.has_value(),
            "bce_loss_and_grads: sample " + std::to_string(idx) +
                " has no attribute labels");

    const Vector a = predict_attributes(p, s.features);
    Vector d_logit(num_attrs);
    for (std::size_t j = 0; j < num_attrs; ++j) {
      const double y = (*s.attribute_labels)[j];
      const double ac = std::min(1.0 - kProbClamp, std::max(kProbClamp, a[j]));
      res.loss -= (y * std::log(ac) + (1.0 - y) * std::log(1.0 - ac)) / denom;
      d_logit[j] = (a[j] - y) / denom;
    }
    res.d_weights.add_outer(d_logit, s.features, 1.0);
    for (std::size_t j = 0; j < num_attrs; ++j) res.d_bias[j] += d_logit[j];
    res.d_features.push_back(p.weights.matvec_transposed(d_logit));
  }
  return res;
}

}  // namespace csib
