#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "netblock/errors.hpp"

namespace netblock {

// Dense row-major matrix of doubles. Small and unclever on purpose; the
// dimensions in this library stay in the hundreds.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, const std::vector<double>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      double* crow = c.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// Symmetric dense matrix. Writes through set() mirror both triangles, so
// entries(i,j) == entries(j,i) holds exactly, never just to roundoff.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim, double fill = 0.0) : m_(dim, dim, fill) {}

  // Symmetrizes by copying the upper triangle onto the lower.
  static SymmetricMatrix from_upper(const Matrix& m) {
    if (m.rows() != m.cols())
      throw DimensionMismatch("SymmetricMatrix: matrix not square");
    SymmetricMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, m(i, j));
    return s;
  }

  static SymmetricMatrix identity(std::size_t n) {
    SymmetricMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
    return s;
  }

  std::size_t dim() const { return m_.rows(); }

  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  void add_to_diagonal(double v) {
    for (std::size_t i = 0; i < dim(); ++i) m_(i, i) += v;
  }

  const Matrix& dense() const { return m_; }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

}  // namespace netblock
