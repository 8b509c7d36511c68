#include "betti/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>

#include "betti/error.hpp"

namespace betti {

std::size_t rank_exact(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < cols; ++j)
      if (sgn(m(i, j)) != 0) l = lcm(l, m(i, j).get_den());
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
  }
  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t p = rank;
    while (p < rows && sgn(a[p][col]) == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    const mpz_class& piv = a[rank][col];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const mpz_class f = a[i][col];
      for (std::size_t j = col + 1; j < cols; ++j) {
        mpz_class v = piv * a[i][j] - f * a[rank][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = std::move(v);
      }
      a[i][col] = 0;
    }
    prev = piv;
    ++rank;
  }
  return rank;
}

std::vector<std::vector<Rational>> nullspace_exact(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j);
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t p = r;
    while (p < rows && sgn(a[p][col]) == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    const Rational inv = 1 / a[r][col];
    for (std::size_t j = col; j < cols; ++j) a[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(a[i][col]) == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j < cols; ++j)
        if (sgn(a[r][j]) != 0) a[i][j] -= f * a[r][j];
    }
    pivot_cols.push_back(col);
    ++r;
  }
  std::vector<char> is_pivot(cols, 0);
  for (std::size_t c : pivot_cols) is_pivot[c] = 1;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols);
    v[free] = 1;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a[k][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

Eigen::MatrixXcd to_eigen(const Matrix<Complex>& m) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

}  // namespace

double min_eigenvalue(const Matrix<Complex>& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <>
SemidefiniteSolver<Rational>::SemidefiniteSolver(const Matrix<Rational>& gram, double /*tol*/) : n_(gram.rows()) {
  if (gram.rows() != gram.cols()) throw Error(ErrorCode::invalid_argument, "Gram matrix must be square");
  Matrix<Rational> a = gram;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (a(i, j) != a(j, i))
        throw Error(ErrorCode::validation, "Gram matrix is not symmetric",
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
  std::vector<char> done(n_, 0);
  for (;;) {
    std::size_t p = n_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (done[i]) continue;
      if (sgn(a(i, i)) < 0) {
        psd_ = false;
        failure_ = "negative pivot " + rational_to_string(a(i, i)) + " at index " + std::to_string(i);
        return;
      }
      if (sgn(a(i, i)) > 0) {
        p = i;
        break;
      }
    }
    if (p == n_) break;
    Step step{p, a(p, p), {}};
    done[p] = 1;
    for (std::size_t j = 0; j < n_; ++j)
      if (!done[j] && sgn(a(j, p)) != 0) step.column.emplace_back(j, a(j, p) / a(p, p));
    for (const auto& [j, lj] : step.column)
      for (const auto& [k, lk] : step.column) a(j, k) -= lj * a(p, p) * lk;
    steps_.push_back(std::move(step));
    ++rank_;
  }
  // Remaining Schur complement has zero diagonal; PSD forces it to vanish.
  for (std::size_t i = 0; i < n_; ++i) {
    if (done[i]) continue;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!done[j] && sgn(a(i, j)) != 0) {
        psd_ = false;
        failure_ = "zero pivot with nonzero off-diagonal at (" + std::to_string(i) + "," + std::to_string(j) + ")";
        return;
      }
    }
  }
}

template <>
Rational SemidefiniteSolver<Rational>::quadratic(std::span<const Rational> b) const {
  if (!psd_) throw Error(ErrorCode::validation, "form is not positive semidefinite", failure_);
  if (b.size() != n_) throw Error(ErrorCode::invalid_argument, "right-hand side has wrong length");
  std::vector<Rational> x(b.begin(), b.end());
  Rational value = 0;
  for (const Step& s : steps_) {
    const Rational bp = x[s.pivot];
    if (sgn(bp) == 0) continue;
    value += bp * bp / s.diag;
    for (const auto& [j, lj] : s.column) x[j] -= lj * bp;
  }
  return value;
}

template <>
SemidefiniteSolver<Complex>::SemidefiniteSolver(const Matrix<Complex>& gram, double tol) : n_(gram.rows()) {
  if (gram.rows() != gram.cols()) throw Error(ErrorCode::invalid_argument, "Gram matrix must be square");
  if (n_ == 0) return;
  const Eigen::MatrixXcd e = to_eigen(gram);
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  if ((e - e.adjoint()).cwiseAbs().maxCoeff() > std::max(tol, 1e-12) * scale)
    throw Error(ErrorCode::validation, "Gram matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(e);
  const auto& vals = es.eigenvalues();
  const double lmax = std::max(0.0, vals.maxCoeff());
  const double cut = tol * lmax;
  if (vals.minCoeff() < -std::max(cut, 1e-12)) {
    psd_ = false;
    failure_ = "negative eigenvalue " + std::to_string(vals.minCoeff());
  }
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    if (vals(k) <= cut || vals(k) <= 0.0) continue;
    eigenvalues_.push_back(vals(k));
    std::vector<Complex> v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), k);
    eigenvectors_.push_back(std::move(v));
  }
  rank_ = eigenvalues_.size();
}

template <>
Complex SemidefiniteSolver<Complex>::quadratic(std::span<const Complex> b) const {
  if (b.size() != n_) throw Error(ErrorCode::invalid_argument, "right-hand side has wrong length");
  double value = 0.0;
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    Complex dot = 0.0;
    for (std::size_t i = 0; i < n_; ++i) dot += std::conj(eigenvectors_[k][i]) * b[i];
    value += std::norm(dot) / eigenvalues_[k];
  }
  return Complex(value, 0.0);
}

}  // namespace betti
