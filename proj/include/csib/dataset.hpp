#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csib/matrix.hpp"

namespace csib {

enum class Split { kTrain, kVal, kTest };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

// One observation: features always present, attribute labels and task
// targets each optional so attribute supervision and task supervision can
// come from disjoint data.
struct SampleRecord {
  Vector features;
  std::optional<std::vector<std::uint8_t>> attribute_labels;  // entries 0/1
  std::optional<Vector> target;
};

// Immutable after construction; one split per dataset.
struct Dataset {
  std::vector<SampleRecord> samples;
  std::size_t feature_dim = 0;
  std::size_t attribute_dim = 0;
  std::size_t target_dim = 0;
  Split split = Split::kTrain;

  std::size_t size() const { return samples.size(); }

  // Indices of samples carrying the respective supervision block.
  std::vector<std::size_t> attribute_labeled_indices() const;
  std::vector<std::size_t> target_labeled_indices() const;

  // Throws unless every sample satisfies the record invariants and shares
  // the declared dimensions.
  void validate() const;
};

// Text format, one sample per line:
//   #csib-dataset F=<int> A=<int> Y=<int>
//   <split>,<F floats>,<A ints or "_">,<Y floats or "_">
// "_" marks an absent supervision block. Values are written with 17
// significant digits so save/load round-trips exactly.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace csib
