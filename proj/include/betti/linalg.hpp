#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betti/scalar.hpp"

namespace betti {

// Dense row-major matrix over Rational or Complex.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, ScalarTraits<S>::zero()) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

// Rank over Q by Bareiss fraction-free elimination. Rows are cleared of
// denominators first, so all work happens in Z.
std::size_t rank_exact(const Matrix<Rational>& m);

// Basis of {x : m x = 0} over Q, one vector per free column.
std::vector<std::vector<Rational>> nullspace_exact(const Matrix<Rational>& m);

// Smallest eigenvalue of a Hermitian matrix (float).
double min_eigenvalue(const Matrix<Complex>& m);

// Pseudo-solver for a positive semidefinite Hermitian form G. quadratic(b)
// returns b* G^+ b for b in the range of G, i.e. the squared length of the
// projection onto the span of the vectors whose Gram matrix is G.
//
// Exact mode: LDL* with diagonal pivoting over Q. A zero pivot with a
// nonzero row, or a negative pivot, means G is not PSD.
// Float mode: Hermitian eigendecomposition; eigenvalues at or below
// tol * lambda_max are discarded.
template <class S>
class SemidefiniteSolver {
 public:
  explicit SemidefiniteSolver(const Matrix<S>& gram, double tol = 1e-9);

  bool positive_semidefinite() const { return psd_; }
  std::size_t rank() const { return rank_; }
  // Index and pivot value of the first failure when not PSD.
  const std::string& failure() const { return failure_; }

  S quadratic(std::span<const S> b) const;

 private:
  struct Step {
    std::size_t pivot;
    S diag;
    std::vector<std::pair<std::size_t, S>> column;  // (j, G_jp / G_pp) for live j
  };

  std::size_t n_ = 0;
  bool psd_ = true;
  std::size_t rank_ = 0;
  std::string failure_;
  std::vector<Step> steps_;
  // Float mode only.
  std::vector<double> eigenvalues_;
  std::vector<std::vector<Complex>> eigenvectors_;
};

template <>
SemidefiniteSolver<Rational>::SemidefiniteSolver(const Matrix<Rational>& gram, double tol);
template <>
Rational SemidefiniteSolver<Rational>::quadratic(std::span<const Rational> b) const;
template <>
SemidefiniteSolver<Complex>::SemidefiniteSolver(const Matrix<Complex>& gram, double tol);
template <>
Complex SemidefiniteSolver<Complex>::quadratic(std::span<const Complex> b) const;

}  // namespace betti
