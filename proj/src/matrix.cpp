// Copyright 2026 The gapkg Authors
// SPDX-License-Identifier: Apache-2.0

#include "gap/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "gap/error.hpp"

namespace gap {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.rows() && out.rows() == a.rows() && out.cols() == b.cols(), "matmul");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = op + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ap[i * k + p];
      if (av == 0.0) continue;
      const double* brow = bp + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

void matmul_at_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows() == b.rows() && out.rows() == a.cols() && out.cols() == b.cols(), "matmul_at");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* brow = bp + r * m;
    for (std::size_t i = 0; i < k; ++i) {
      const double av = ap[r * k + i];
      if (av == 0.0) continue;
      double* orow = op + i * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

void matmul_bt_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols() == b.cols() && out.rows() == a.rows() && out.cols() == b.rows(), "matmul_bt");
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  const double* ap = a.data();
  const double* bp = b.data();
  double* op = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = ap + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = bp + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      op[i * m + j] += s;
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  matmul_acc(a, b, out);
  return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
  Matrix out(a.cols(), b.cols());
  matmul_at_acc(a, b, out);
  return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  matmul_bt_acc(a, b, out);
  return out;
}

void add_inplace(Matrix& dst, const Matrix& src) {
  require(dst.rows() == src.rows() && dst.cols() == src.cols(), "add");
  double* d = dst.data();
  const double* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace gap
