#include "csib/matrix.hpp"

#include "csib/util.hpp"

namespace csib {

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_,
          "Matrix: data length does not match rows*cols");
}

Vector Matrix::matvec(std::span<const double> x) const {
  require(x.size() == cols_, "matvec: dimension mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    const double* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

Vector Matrix::matvec_transposed(std::span<const double> x) const {
  require(x.size() == rows_, "matvec_transposed: dimension mismatch");
  Vector y(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) y[c] += row[c] * x[r];
  }
  return y;
}

void Matrix::add_outer(std::span<const double> u, std::span<const double> v,
                       double scale) {
  require(u.size() == rows_ && v.size() == cols_, "add_outer: dimension mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    double* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) row[c] += scale * u[r] * v[c];
  }
}

void Matrix::check_finite(const std::string& name) const {
  csib::check_finite(data_, name);
}

void check_finite(std::span<const double> v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    require(is_finite(v[i]),
            name + ": non-finite value at index " + std::to_string(i));
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace csib
