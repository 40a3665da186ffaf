#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csib/grouping.hpp"
#include "csib/output.hpp"

namespace csib {

// Hyperparameters for the three training stages. Learning rates decay by
// `decay_factor` at fixed fractions of each stage's budget: halfway and
// three-quarters for stage 1, never for stage 2, and at the 1/5, 2/5 and
// 3/5 marks for stage 3.
struct TrainConfig {
  std::size_t num_groups = 8;  // Z

  // Sparsity levels averaged in the task loss. Empty selects {1..8, Z}
  // (clipped to Z); the dense level Z is appended if missing.
  std::vector<std::size_t> k_set;
  std::size_t k_eval = 0;  // 0 -> dense

  std::size_t stage1_iters = 2000;
  std::size_t stage2_iters = 2000;
  std::size_t stage3_iters = 3000;

  std::size_t attr_batch = 10;
  std::size_t task_batch = 10;
  std::size_t pretrain_batch = 100;

  double stage1_lr = 0.002;
  double stage2_lr = 0.002;
  double stage3_lr = 0.002;
  double decay_factor = 4.0;

  double momentum = 0.9;
  double lambda = 0.1;  // task-loss weight in stage 3
  double eps = kDefaultLogEps;

  std::uint64_t seed = 0;
  LoffVariant loff_variant = LoffVariant::kProse;
  TopkRule topk_rule = TopkRule::kMagnitude;

  std::size_t log_interval = 100;

  std::vector<std::size_t> stage1_decay_steps() const;
  std::vector<std::size_t> stage3_decay_steps() const;

  // Effective k levels for a model with `num_groups` groups; fills defaults
  // and guarantees the dense level is present.
  std::vector<std::size_t> resolved_k_set() const;
  std::size_t resolved_k_eval() const;

  void validate() const;
};

// Flat "key = value" file, '#' starts a comment. Unknown keys are errors.
TrainConfig load_config(const std::string& path);
TrainConfig config_from_string(const std::string& text);
std::string config_to_string(const TrainConfig& config);

}  // namespace csib
