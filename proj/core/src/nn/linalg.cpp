#include "hyperorder/nn/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hyperorder::nn {

namespace {

[[noreturn]] void shape_error(const char* op, std::size_t r, std::size_t c, std::size_t x,
                              std::size_t y) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch, matrix " + std::to_string(r) +
                              "x" + std::to_string(c) + " with vectors " + std::to_string(x) +
                              ", " + std::to_string(y));
}

// Four interleaved partial sums: a fixed, platform-independent evaluation
// order that still pipelines.
double dot_unchecked(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void gemv_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    shape_error("gemv", a.rows(), a.cols(), x.size(), y.size());
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    y[r] += alpha * dot_unchecked(a.row(r).data(), x.data(), x.size());
  }
}

void gemv_t_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    shape_error("gemv_t", a.rows(), a.cols(), x.size(), y.size());
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double s = alpha * x[r];
    if (s == 0.0) continue;
    const auto row = a.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) y[c] += s * row[c];
  }
}

void ger_add(Matrix& a, std::span<const double> u, std::span<const double> v, double alpha) {
  if (u.size() != a.rows() || v.size() != a.cols()) {
    shape_error("ger", a.rows(), a.cols(), u.size(), v.size());
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double s = alpha * u[r];
    if (s == 0.0) continue;
    auto row = a.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += s * v[c];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return dot_unchecked(a.data(), b.data(), a.size());
}

}  // namespace hyperorder::nn
