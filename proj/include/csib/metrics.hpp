#pragma once

#include <span>
#include <vector>

#include "csib/dataset.hpp"
#include "csib/model.hpp"

namespace csib {

// Tie-corrected (tau-b) rank correlation. Throws when either argument is
// all ties, where the coefficient is undefined.
double kendall_tau(std::span<const double> pred, std::span<const double> target);

double rmse(std::span<const double> pred, std::span<const double> target);

// Rank-based average precision: mean of the running precision at each
// positive, scores descending, ties broken by original index.
double average_precision(std::span<const double> scores,
                         std::span<const std::uint8_t> labels);

// Mean number of attributes that reach the output through some kept group:
// attribute j counts for a sample when a group i kept at the model's k_eval
// has G_ij > 0 and a contribution magnitude above prune_threshold.
double explanation_size(const CsibModel& model, const Dataset& ds,
                        double prune_threshold);

// Per-sample predictions for output 0 at sparsity level k, restricted to
// target-labeled samples; returns (predictions, targets).
std::pair<Vector, Vector> predict_targets(const CsibModel& model,
                                          const Dataset& ds, std::size_t k);

}  // namespace csib
