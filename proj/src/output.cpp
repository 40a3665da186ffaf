#include "csib/output.hpp"

#include <algorithm>
#include <cmath>

#include "csib/util.hpp"

namespace csib {

OutputLayer::OutputLayer(std::size_t num_outputs, std::size_t num_groups)
    : w(num_outputs, num_groups), bias(num_outputs, 0.0), k_eval(num_groups) {
  k_set.push_back(num_groups);
}

void OutputLayer::validate() const {
  require(bias.size() == num_outputs(), "OutputLayer: bias dimension mismatch");
  require(!k_set.empty(), "OutputLayer: k_set must not be empty");
  require(std::find(k_set.begin(), k_set.end(), num_groups()) != k_set.end(),
          "OutputLayer: k_set must contain the dense level K = Z");
  for (std::size_t k : k_set)
    require(k >= 1, "OutputLayer: k values must be >= 1");
  require(k_eval >= 1, "OutputLayer: k_eval must be >= 1");
}

namespace {

// Indices of the K entries of `contrib` kept for one output row, as a mask.
// The keep order (rule-descending, index ascending) is total, so the kept
// set at K is always a subset of the kept set at K+1.
std::vector<char> keep_mask(std::span<const double> contrib, TopkRule rule,
                            std::size_t k) {
  const std::size_t n = contrib.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto key = [&](std::size_t i) {
    return rule == TopkRule::kMagnitude ? std::abs(contrib[i]) : contrib[i];
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    return a < b;
  });
  std::vector<char> kept(n, 0);
  for (std::size_t r = 0; r < std::min(k, n); ++r) kept[order[r]] = 1;
  return kept;
}

}  // namespace

TopkResult topk_forward(std::span<const double> z, const OutputLayer& layer,
                        std::size_t k) {
  require(z.size() == layer.num_groups(), "topk_forward: z dimension mismatch");
  require(k >= 1, "topk_forward: k must be >= 1");

  const std::size_t num_outputs = layer.num_outputs();
  const std::size_t num_groups = layer.num_groups();

  TopkResult res;
  res.y.resize(num_outputs);
  res.contributions.reserve(num_outputs * num_groups);

  Vector contrib(num_groups);
  for (std::size_t y = 0; y < num_outputs; ++y) {
    for (std::size_t i = 0; i < num_groups; ++i)
      contrib[i] = layer.w.at(y, i) * z[i];
    const auto kept = keep_mask(contrib, layer.rule, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < num_groups; ++i) {
      if (kept[i]) acc += contrib[i];
      res.contributions.push_back({i, y, contrib[i], kept[i] != 0});
    }
    res.y[y] = acc + layer.bias[y];
  }
  return res;
}

TopkBackwardResult topk_backward(std::span<const double> z,
                                 const OutputLayer& layer, std::size_t k,
                                 std::span<const double> upstream) {
  require(z.size() == layer.num_groups(), "topk_backward: z dimension mismatch");
  require(upstream.size() == layer.num_outputs(),
          "topk_backward: upstream dimension mismatch");
  require(k >= 1, "topk_backward: k must be >= 1");

  const std::size_t num_outputs = layer.num_outputs();
  const std::size_t num_groups = layer.num_groups();

  TopkBackwardResult res;
  res.d_z.assign(num_groups, 0.0);
  res.d_w = Matrix(num_outputs, num_groups);

  Vector contrib(num_groups);
  for (std::size_t y = 0; y < num_outputs; ++y) {
    for (std::size_t i = 0; i < num_groups; ++i)
      contrib[i] = layer.w.at(y, i) * z[i];
    const auto kept = keep_mask(contrib, layer.rule, k);
    for (std::size_t i = 0; i < num_groups; ++i) {
      if (!kept[i]) continue;
      res.d_w.at(y, i) += upstream[y] * z[i];
      res.d_z[i] += upstream[y] * layer.w.at(y, i);
    }
  }
  return res;
}

MultiKResult multi_k_loss(std::span<const double> z, const OutputLayer& layer,
                          std::span<const double> target) {
  layer.validate();
  require(target.size() == layer.num_outputs(),
          "multi_k_loss: target dimension mismatch");

  const std::size_t num_outputs = layer.num_outputs();
  const double k_count = static_cast<double>(layer.k_set.size());

  MultiKResult res;
  res.d_z.assign(layer.num_groups(), 0.0);
  res.d_w = Matrix(num_outputs, layer.num_groups());

  for (std::size_t k : layer.k_set) {
    const TopkResult fwd = topk_forward(z, layer, k);
    double mse = 0.0;
    Vector upstream(num_outputs);
    for (std::size_t y = 0; y < num_outputs; ++y) {
      const double diff = fwd.y[y] - target[y];
      mse += diff * diff / static_cast<double>(num_outputs);
      upstream[y] = 2.0 * diff / (static_cast<double>(num_outputs) * k_count);
    }
    res.per_k.emplace_back(k, mse);
    res.loss += mse / k_count;

    const TopkBackwardResult bwd = topk_backward(z, layer, k, upstream);
    for (std::size_t i = 0; i < res.d_z.size(); ++i) res.d_z[i] += bwd.d_z[i];
    for (std::size_t i = 0; i < res.d_w.size(); ++i)
      res.d_w.data()[i] += bwd.d_w.data()[i];
  }
  return res;
}

void init_bias_from_targets(OutputLayer& layer,
                            const std::vector<Vector>& targets) {
  require(!targets.empty(), "init_bias_from_targets: no targets");
  const std::size_t num_outputs = layer.num_outputs();
  Vector mean(num_outputs, 0.0);
  for (const Vector& t : targets) {
    require(t.size() == num_outputs, "init_bias_from_targets: target dimension mismatch");
    for (std::size_t y = 0; y < num_outputs; ++y) mean[y] += t[y];
  }
  for (double& m : mean) m /= static_cast<double>(targets.size());
  layer.bias = std::move(mean);
  layer.w.fill(0.0);
}

}  // namespace csib
