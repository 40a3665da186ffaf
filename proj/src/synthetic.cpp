#include "csib/synthetic.hpp"

#include <algorithm>

#include "csib/rng.hpp"
#include "csib/util.hpp"

namespace csib {

namespace {

constexpr double kFeatureNoiseSd = 0.01;

// Stream ids under the spec seed.
constexpr std::uint64_t kStreamStructure = 0xA0;
constexpr std::uint64_t kStreamProjection = 0xA1;
constexpr std::uint64_t kStreamSamplesBase = 0xB0;

std::vector<double> default_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t g = 0; g < n; ++g) {
    const double magnitude = 2.0 - static_cast<double>(g) / static_cast<double>(n);
    w[g] = (g % 2 == 0) ? magnitude : -magnitude;
  }
  return w;
}

}  // namespace

void PlantedSpec::validate() const {
  require(num_attributes >= 1, "PlantedSpec: num_attributes must be >= 1");
  require(num_true_groups >= 1, "PlantedSpec: num_true_groups must be >= 1");
  require(attrs_per_group >= 1 && attrs_per_group <= num_attributes,
          "PlantedSpec: attrs_per_group must be in [1, num_attributes]");
  require(group_weights.empty() || group_weights.size() == num_true_groups,
          "PlantedSpec: group_weights must be empty or one per group");
  require(attribute_noise >= 0.0 && attribute_noise < 1.0,
          "PlantedSpec: attribute_noise must be in [0,1)");
  require(target_noise_sd >= 0.0, "PlantedSpec: target_noise_sd must be >= 0");
  require(is_finite(target_bias), "PlantedSpec: target_bias must be finite");
  require(feature_dim >= 1, "PlantedSpec: feature_dim must be >= 1");
}

PlantedProblem::PlantedProblem(const PlantedSpec& spec) : spec_(spec) {
  spec_.validate();

  const auto weights = spec_.group_weights.empty()
                           ? default_weights(spec_.num_true_groups)
                           : spec_.group_weights;

  Rng structure_rng(derive_seed(spec_.seed, kStreamStructure));
  groups_.reserve(spec_.num_true_groups);
  for (std::size_t g = 0; g < spec_.num_true_groups; ++g) {
    PlantedGroup group;
    group.attributes = structure_rng.sample_without_replacement(
        spec_.num_attributes, spec_.attrs_per_group);
    std::sort(group.attributes.begin(), group.attributes.end());
    group.weight = weights[g];
    groups_.push_back(std::move(group));
  }

  Rng proj_rng(derive_seed(spec_.seed, kStreamProjection));
  projection_ = Matrix(spec_.feature_dim, spec_.num_attributes);
  for (double& p : projection_.data()) p = proj_rng.normal();
}

std::pair<Dataset, GroundTruth> PlantedProblem::generate(
    std::size_t n, Split split, std::uint64_t stream) const {
  require(n >= 1, "PlantedProblem::generate: n must be >= 1");
  Rng rng(derive_seed(spec_.seed, kStreamSamplesBase + stream));

  Dataset ds;
  ds.feature_dim = spec_.feature_dim;
  ds.attribute_dim = spec_.num_attributes;
  ds.target_dim = 1;
  ds.split = split;
  ds.samples.reserve(n);

  GroundTruth truth;
  truth.groups = groups_;
  truth.bias = spec_.target_bias;
  truth.active.reserve(n);

  const std::size_t num_groups = groups_.size();
  for (std::size_t s = 0; s < n; ++s) {
    // Each group active with probability 0.5; redraw until one is active.
    std::vector<bool> active(num_groups, false);
    bool any = false;
    while (!any) {
      for (std::size_t g = 0; g < num_groups; ++g) {
        active[g] = rng.bernoulli(0.5);
        any = any || active[g];
      }
    }

    std::vector<std::uint8_t> labels(spec_.num_attributes, 0);
    double clean_target = spec_.target_bias;
    for (std::size_t g = 0; g < num_groups; ++g) {
      if (!active[g]) continue;
      for (std::size_t j : groups_[g].attributes) labels[j] = 1;
      clean_target += groups_[g].weight;
    }
    for (auto& bit : labels)
      if (rng.uniform01() < spec_.attribute_noise) bit = 1 - bit;

    const double target = clean_target + spec_.target_noise_sd * rng.normal();

    Vector label_values(labels.begin(), labels.end());
    Vector features = projection_.matvec(label_values);
    for (double& f : features) f += kFeatureNoiseSd * rng.normal();

    SampleRecord rec;
    rec.features = std::move(features);
    rec.attribute_labels = std::move(labels);
    rec.target = Vector{target};
    ds.samples.push_back(std::move(rec));
    truth.active.push_back(std::move(active));
  }

  ds.validate();
  return {std::move(ds), std::move(truth)};
}

std::pair<Dataset, GroundTruth> generate_synthetic(const PlantedSpec& spec,
                                                   std::size_t n) {
  return PlantedProblem(spec).generate(n, Split::kTrain, 0);
}

}  // namespace csib
