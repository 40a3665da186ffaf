#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace csib {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. All training state (attribute weights,
// the grouping matrix G, the output weights W, batch activations) lives in
// this type. Operations are plain loops with a fixed summation order so that
// repeated runs are bit-identical.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, Vector data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  // y = M x, accumulated left to right along each row.
  Vector matvec(std::span<const double> x) const;

  // y = M^T x.
  Vector matvec_transposed(std::span<const double> x) const;

  // M += scale * u v^T.
  void add_outer(std::span<const double> u, std::span<const double> v, double scale);

  // Throws if any entry is NaN or infinite; `name` identifies the offender.
  void check_finite(const std::string& name) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

void check_finite(std::span<const double> v, const std::string& name);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace csib
