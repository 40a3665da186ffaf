#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csib/dataset.hpp"
#include "csib/matrix.hpp"

namespace csib {

// Recipe for a synthetic dataset with known attribute groups. Targets are
// linear in the group activity indicators, so a trained model can be scored
// against the exact generating structure.
struct PlantedSpec {
  std::size_t num_attributes = 0;
  std::size_t num_true_groups = 0;
  std::size_t attrs_per_group = 0;
  std::vector<double> group_weights;  // empty -> alternating-sign defaults
  double attribute_noise = 0.0;       // per-attribute flip probability
  double target_noise_sd = 0.0;
  double target_bias = 0.0;
  std::size_t feature_dim = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlantedGroup {
  std::vector<std::size_t> attributes;  // sorted indices
  double weight = 0.0;
};

// The generating structure behind a dataset, kept alongside it so tests can
// recompute noise-free targets and score group recovery.
struct GroundTruth {
  std::vector<PlantedGroup> groups;
  double bias = 0.0;
  // active[sample][group]
  std::vector<std::vector<bool>> active;
};

// Fixing the spec fixes the group supports, weights, and the random linear
// feature embedding; separate splits can then be drawn from one problem so
// they share the same embedding.
class PlantedProblem {
 public:
  explicit PlantedProblem(const PlantedSpec& spec);

  std::pair<Dataset, GroundTruth> generate(std::size_t n, Split split,
                                           std::uint64_t stream) const;

  const std::vector<PlantedGroup>& groups() const { return groups_; }
  double bias() const { return spec_.target_bias; }
  const PlantedSpec& spec() const { return spec_; }

 private:
  PlantedSpec spec_;
  std::vector<PlantedGroup> groups_;
  Matrix projection_;  // feature_dim x num_attributes
};

// Single-call form: one train-split dataset drawn from stream 0.
std::pair<Dataset, GroundTruth> generate_synthetic(const PlantedSpec& spec,
                                                   std::size_t n);

}  // namespace csib
