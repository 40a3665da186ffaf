#include "csib/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "csib/util.hpp"

namespace csib {

Vector project_row_simplex(std::span<const double> v) {
  require(!v.empty(), "project_row_simplex: empty vector");
  check_finite(v, "project_row_simplex");

  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  // Largest prefix whose shifted values stay positive.
  double cumsum = 0.0;
  double theta = 0.0;
  std::size_t support = 0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) {
      theta = candidate;
      support = j + 1;
    }
  }
  require(support > 0, "project_row_simplex: degenerate input");

  Vector w(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    w[j] = std::max(v[j] - theta, 0.0);
  return w;
}

GroupingMatrix GroupingMatrix::random_init(std::size_t num_groups,
                                           std::size_t num_attributes, Rng& rng) {
  GroupingMatrix gm(num_groups, num_attributes);
  for (std::size_t i = 0; i < num_groups; ++i) {
    const Vector row = rng.dirichlet_uniform(num_attributes);
    std::copy(row.begin(), row.end(), gm.g.row(i).begin());
  }
  return gm;
}

void GroupingMatrix::project_rows() {
  for (std::size_t i = 0; i < num_groups(); ++i) {
    const Vector projected = project_row_simplex(g.row(i));
    std::copy(projected.begin(), projected.end(), g.row(i).begin());
  }
}

void GroupingMatrix::validate() const {
  for (std::size_t i = 0; i < num_groups(); ++i) {
    double sum = 0.0;
    for (double x : g.row(i)) {
      require(x >= 0.0, "GroupingMatrix: negative entry in row " + std::to_string(i));
      sum += x;
    }
    require(std::abs(sum - 1.0) <= 1e-9,
            "GroupingMatrix: row " + std::to_string(i) + " sum " +
                format_double(sum) + " is off the simplex");
  }
}

namespace {

double clamped_log(double a, double eps) { return std::log(std::max(a, eps)); }

}  // namespace

Matrix group_forward_batch(const Matrix& attrs, const GroupingMatrix& gm,
                           double eps) {
  require(attrs.cols() == gm.num_attributes(),
          "group_forward: attribute dimension mismatch");
  const std::size_t batch = attrs.rows();
  const std::size_t num_groups = gm.num_groups();
  const std::size_t num_attrs = gm.num_attributes();

  Matrix z(batch, num_groups);
  Vector log_a(num_attrs);
  for (std::size_t u = 0; u < batch; ++u) {
    const auto a = attrs.row(u);
    for (std::size_t j = 0; j < num_attrs; ++j) log_a[j] = clamped_log(a[j], eps);
    for (std::size_t i = 0; i < num_groups; ++i)
      z.at(u, i) = std::exp(dot(gm.g.row(i), log_a));
  }
  return z;
}

Vector group_forward(std::span<const double> attrs, const GroupingMatrix& gm,
                     double eps) {
  Matrix a(1, attrs.size(), Vector(attrs.begin(), attrs.end()));
  Matrix z = group_forward_batch(a, gm, eps);
  return Vector(z.row(0).begin(), z.row(0).end());
}

GroupBackwardResult group_backward(const Matrix& attrs, const GroupingMatrix& gm,
                                   const Matrix& upstream, double eps) {
  require(upstream.rows() == attrs.rows() && upstream.cols() == gm.num_groups(),
          "group_backward: upstream shape mismatch");
  const std::size_t batch = attrs.rows();
  const std::size_t num_groups = gm.num_groups();
  const std::size_t num_attrs = gm.num_attributes();
  const Matrix z = group_forward_batch(attrs, gm, eps);

  GroupBackwardResult res;
  res.d_attrs = Matrix(batch, num_attrs);
  res.d_g = Matrix(num_groups, num_attrs);

  for (std::size_t u = 0; u < batch; ++u) {
    const auto a = attrs.row(u);
    for (std::size_t i = 0; i < num_groups; ++i) {
      const double scale = upstream.at(u, i) * z.at(u, i);
      if (scale == 0.0) continue;
      for (std::size_t j = 0; j < num_attrs; ++j) {
        if (a[j] >= eps)
          res.d_attrs.at(u, j) += scale * gm.g.at(i, j) / a[j];
        res.d_g.at(i, j) += scale * clamped_log(a[j], eps);
      }
    }
  }
  return res;
}

std::pair<Vector, Matrix> group_backward(std::span<const double> attrs,
                                         const GroupingMatrix& gm,
                                         std::span<const double> upstream,
                                         double eps) {
  Matrix a(1, attrs.size(), Vector(attrs.begin(), attrs.end()));
  Matrix up(1, upstream.size(), Vector(upstream.begin(), upstream.end()));
  GroupBackwardResult res = group_backward(a, gm, up, eps);
  Vector d_attrs(res.d_attrs.row(0).begin(), res.d_attrs.row(0).end());
  return {std::move(d_attrs), std::move(res.d_g)};
}

namespace {

// Pairwise cross-entropy sum over a family of non-negative vectors, plus its
// gradient. The family is addressed through accessors so the same code
// handles both the columns and the rows of the activation matrix.
//
// With p_k the k-th vector normalized by its sum s_k, accumulates
//   sum_{k != l} sum_t p_k[t] * log(max(p_l[t], eps))
// which is the negated sum of pairwise cross-entropies. Gradient w.r.t. the
// raw entries goes through both arguments of every pair and through the
// normalization.
class PairwiseCrossEntropy {
 public:
  PairwiseCrossEntropy(std::size_t count, std::size_t length, double eps)
      : count_(count), length_(length), eps_(eps) {}

  template <typename Get, typename AddGrad>
  double run(Get get, AddGrad add_grad) const {
    std::vector<Vector> p(count_);
    std::vector<double> sums(count_, 0.0);
    std::vector<bool> valid(count_, false);
    for (std::size_t k = 0; k < count_; ++k) {
      double s = 0.0;
      for (std::size_t t = 0; t < length_; ++t) s += get(k, t);
      sums[k] = s;
      valid[k] = s >= 1e-12;
      if (!valid[k]) continue;
      p[k].resize(length_);
      for (std::size_t t = 0; t < length_; ++t) p[k][t] = get(k, t) / s;
    }

    // Per-position totals over valid vectors.
    Vector sum_log(length_, 0.0), sum_p(length_, 0.0);
    std::vector<Vector> logs(count_);
    for (std::size_t k = 0; k < count_; ++k) {
      if (!valid[k]) continue;
      logs[k].resize(length_);
      for (std::size_t t = 0; t < length_; ++t) {
        logs[k][t] = clamped_log(p[k][t], eps_);
        sum_log[t] += logs[k][t];
        sum_p[t] += p[k][t];
      }
    }

    double loss = 0.0;
    Vector d_p(length_);
    for (std::size_t k = 0; k < count_; ++k) {
      if (!valid[k]) continue;
      double inner = 0.0;
      for (std::size_t t = 0; t < length_; ++t) {
        loss += p[k][t] * (sum_log[t] - logs[k][t]);
        double g = sum_log[t] - logs[k][t];
        if (p[k][t] >= eps_) g += (sum_p[t] - p[k][t]) / p[k][t];
        d_p[t] = g;
        inner += g * p[k][t];
      }
      for (std::size_t t = 0; t < length_; ++t)
        add_grad(k, t, (d_p[t] - inner) / sums[k]);
    }
    return loss;
  }

 private:
  std::size_t count_;
  std::size_t length_;
  double eps_;
};

}  // namespace

PretrainLosses pretrain_losses(const Matrix& zbatch, LoffVariant variant,
                               double eps) {
  const std::size_t batch = zbatch.rows();
  const std::size_t num_groups = zbatch.cols();
  require(batch >= 2, "pretrain_losses: batch size must be >= 2");
  require(num_groups >= 2, "pretrain_losses: need at least 2 groups");

  PretrainLosses res;
  res.d_z = Matrix(batch, num_groups);

  // l_on: highest value in each column and each row pulled towards one.
  for (std::size_t i = 0; i < num_groups; ++i) {
    std::size_t best = 0;
    for (std::size_t u = 1; u < batch; ++u)
      if (zbatch.at(u, i) > zbatch.at(best, i)) best = u;
    res.l_on -= zbatch.at(best, i);
    res.d_z.at(best, i) -= 1.0;
  }
  for (std::size_t u = 0; u < batch; ++u) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < num_groups; ++i)
      if (zbatch.at(u, i) > zbatch.at(u, best)) best = i;
    res.l_on -= zbatch.at(u, best);
    res.d_z.at(u, best) -= 1.0;
  }

  // l_off: a single max-of-mins element, chosen per variant.
  if (variant == LoffVariant::kProse) {
    std::size_t arg_group = 0, arg_sample = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < num_groups; ++i) {
      std::size_t umin = 0;
      for (std::size_t u = 1; u < batch; ++u)
        if (zbatch.at(u, i) < zbatch.at(umin, i)) umin = u;
      if (zbatch.at(umin, i) > best) {
        best = zbatch.at(umin, i);
        arg_group = i;
        arg_sample = umin;
      }
    }
    res.l_off = best;
    res.d_z.at(arg_sample, arg_group) += 1.0;
  } else {
    std::size_t arg_group = 0, arg_sample = 0;
    double best = -1.0;
    for (std::size_t u = 0; u < batch; ++u) {
      std::size_t imin = 0;
      for (std::size_t i = 1; i < num_groups; ++i)
        if (zbatch.at(u, i) < zbatch.at(u, imin)) imin = i;
      if (zbatch.at(u, imin) > best) {
        best = zbatch.at(u, imin);
        arg_sample = u;
        arg_group = imin;
      }
    }
    res.l_off = best;
    res.d_z.at(arg_sample, arg_group) += 1.0;
  }

  // l_h: negated pairwise cross-entropies between normalized columns and
  // between normalized rows.
  const PairwiseCrossEntropy cols(num_groups, batch, eps);
  res.l_h += cols.run(
      [&](std::size_t i, std::size_t u) { return zbatch.at(u, i); },
      [&](std::size_t i, std::size_t u, double g) { res.d_z.at(u, i) += g; });
  const PairwiseCrossEntropy rows(batch, num_groups, eps);
  res.l_h += rows.run(
      [&](std::size_t u, std::size_t i) { return zbatch.at(u, i); },
      [&](std::size_t u, std::size_t i, double g) { res.d_z.at(u, i) += g; });

  res.total = res.l_on + res.l_off + res.l_h;
  return res;
}

}  // namespace csib
