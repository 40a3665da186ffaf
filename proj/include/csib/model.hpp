#pragma once

#include <cstdint>
#include <string>

#include "csib/attributes.hpp"
#include "csib/grouping.hpp"
#include "csib/output.hpp"

namespace csib {

struct ModelMeta {
  std::uint64_t seed = 0;
  int stage_completed = 0;  // 0 = fresh, 3 = fully trained
  std::size_t stage1_iterations = 0;
  std::size_t stage2_iterations = 0;
  std::size_t stage3_iterations = 0;
  bool bias_initialized = false;
};

// The assembled bottleneck model: features -> attribute probabilities ->
// group activations -> sparse output.
struct CsibModel {
  AttributePredictor predictor;
  GroupingMatrix grouping;
  OutputLayer output;
  double eps = kDefaultLogEps;
  ModelMeta meta;

  std::size_t feature_dim() const { return predictor.feature_dim(); }
  std::size_t num_attributes() const { return predictor.num_attributes(); }
  std::size_t num_groups() const { return grouping.num_groups(); }
  std::size_t num_outputs() const { return output.num_outputs(); }

  void validate() const;
};

// Fresh model: zero predictor, Dirichlet(1) grouping rows (seeded from
// `seed`), zero output weights and bias.
CsibModel make_model(std::size_t feature_dim, std::size_t num_attributes,
                     std::size_t num_groups, std::size_t num_outputs,
                     std::uint64_t seed);

// Full forward pass at sparsity level k.
Vector model_forward(const CsibModel& model, std::span<const double> features,
                     std::size_t k);

// Versioned text checkpoint; 17-significant-digit values make
// save -> load -> save byte-identical.
void save_checkpoint(const CsibModel& model, const std::string& path);
CsibModel load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const CsibModel& model);
CsibModel checkpoint_from_string(const std::string& text);

}  // namespace csib
