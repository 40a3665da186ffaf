#pragma once

#include <span>
#include <utility>
#include <vector>

#include "csib/matrix.hpp"
#include "csib/rng.hpp"

namespace csib {

inline constexpr double kDefaultLogEps = 1e-6;

// Euclidean projection onto {w : w >= 0, sum w = 1} by sort-and-threshold.
Vector project_row_simplex(std::span<const double> v);

// Z x A grouping matrix; every row lives on the probability simplex. Each
// row is one group: the exponents of a weighted geometric mean over
// attribute probabilities, so membership weights are non-negative and
// compete for a total budget of one.
struct GroupingMatrix {
  Matrix g;

  GroupingMatrix() = default;
  GroupingMatrix(std::size_t num_groups, std::size_t num_attributes)
      : g(num_groups, num_attributes) {}

  std::size_t num_groups() const { return g.rows(); }
  std::size_t num_attributes() const { return g.cols(); }

  // Rows drawn from a symmetric Dirichlet(1), already on the simplex.
  static GroupingMatrix random_init(std::size_t num_groups,
                                    std::size_t num_attributes, Rng& rng);

  // Re-project every row; applied after each SGD step on g.
  void project_rows();

  // Throws unless every entry is >= 0 and every row sums to 1 within 1e-9.
  void validate() const;
};

// Soft-AND grouping: z_i = prod_j a_j^{G_ij}, computed as a linear map over
// log probabilities. Attribute values are clamped to `eps` inside the log
// only, so the forward value is untouched for a_j > eps.
Vector group_forward(std::span<const double> attrs, const GroupingMatrix& gm,
                     double eps = kDefaultLogEps);

// Batch form: rows of `attrs` are samples; returns B x Z activations.
Matrix group_forward_batch(const Matrix& attrs, const GroupingMatrix& gm,
                           double eps = kDefaultLogEps);

struct GroupBackwardResult {
  Matrix d_attrs;  // B x A
  Matrix d_g;      // Z x A
};

// Analytic gradients of the soft-AND map:
//   dz_i/da_j = z_i * G_ij / max(a_j, eps)   (zero where a_j < eps)
//   dz_i/dG_ij = z_i * log(max(a_j, eps))
GroupBackwardResult group_backward(const Matrix& attrs, const GroupingMatrix& gm,
                                   const Matrix& upstream,
                                   double eps = kDefaultLogEps);

// Single-sample convenience wrapper.
std::pair<Vector, Matrix> group_backward(std::span<const double> attrs,
                                         const GroupingMatrix& gm,
                                         std::span<const double> upstream,
                                         double eps = kDefaultLogEps);

// Two readings of the keep-groups-off term: the prose description
// (max over groups of the per-group minimum across samples) versus the
// displayed formula with the indices the other way around.
enum class LoffVariant { kProse, kLiteral };

struct PretrainLosses {
  double l_on = 0.0;
  double l_off = 0.0;
  double l_h = 0.0;
  double total = 0.0;
  Matrix d_z;  // B x Z
};

// Unsupervised diversity losses over a batch of group activations
// (B x Z, entries in (0,1]):
//   l_on  = -sum_i max_u Z_ui - sum_u max_i Z_ui
//   l_off = per LoffVariant
//   l_h   = -sum of pairwise cross-entropies between normalized columns and
//           between normalized rows
// Max/min subgradients flow through the first attaining element only.
// Columns/rows with sum < 1e-12 are skipped from the pairwise terms.
PretrainLosses pretrain_losses(const Matrix& zbatch,
                               LoffVariant variant = LoffVariant::kProse,
                               double eps = kDefaultLogEps);

}  // namespace csib
