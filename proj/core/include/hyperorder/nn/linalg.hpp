#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hyperorder::nn {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y += alpha * A x
void gemv_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha = 1.0);
/// y += alpha * A^T x
void gemv_t_add(const Matrix& a, std::span<const double> x, std::span<double> y,
                double alpha = 1.0);
/// A += alpha * u v^T
void ger_add(Matrix& a, std::span<const double> u, std::span<const double> v, double alpha = 1.0);

void axpy(double alpha, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace hyperorder::nn
