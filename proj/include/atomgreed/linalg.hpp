#ifndef ATOMGREED_LINALG_HPP
#define ATOMGREED_LINALG_HPP

// Dense kernels shared by the rest of the library: Gram-Schmidt,
// projection onto a span, SVD and minimum-norm least squares.
//
// Vectors of the ambient Hilbert space are Eigen::VectorXd. Matrix-valued
// spaces (rank-one atoms, orthogonal matrices) are carried flattened in
// row-major order; reshape()/flatten() convert between the two views.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "atomgreed/errors.hpp"

namespace atomgreed {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kRankTolerance = 1e-10;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Row-major reshape of a flattened vector into rows x cols.
inline Matrix reshape(const Vector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw DimensionMismatch("reshape: " + std::to_string(v.size()) +
                            " entries cannot form a " + std::to_string(rows) +
                            "x" + std::to_string(cols) + " matrix");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

inline Vector flatten(const Matrix& m) {
  Vector v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

// Modified Gram-Schmidt with one reorthogonalization pass. Vectors whose
// residual after projection falls below `tol` are dropped.
inline std::vector<Vector> orthonormalize(std::span<const Vector> vectors,
                                          double tol = kRankTolerance) {
  if (!(tol > 0)) throw InvalidArgument("orthonormalize: tol must be positive");
  std::vector<Vector> basis;
  if (vectors.empty()) return basis;
  const Index dim = vectors.front().size();
  for (const Vector& v : vectors) {
    if (v.size() != dim) {
      throw DimensionMismatch("orthonormalize: vectors of dimension " +
                              std::to_string(dim) + " and " +
                              std::to_string(v.size()));
    }
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : basis) w -= q.dot(w) * q;
    const double norm = w.norm();
    if (norm < tol) continue;
    basis.push_back(w / norm);
  }
  return basis;
}

// Packs a list of equal-length vectors as the columns of a matrix.
inline Matrix as_columns(std::span<const Vector> vectors, Index dim) {
  Matrix m(dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != dim)
      throw DimensionMismatch("as_columns: inconsistent vector dimensions");
    m.col(static_cast<Index>(j)) = vectors[j];
  }
  return m;
}

inline Vector project(const Vector& v, std::span<const Vector> basis) {
  Vector out = Vector::Zero(v.size());
  for (const Vector& b : basis) {
    if (b.size() != v.size())
      throw DimensionMismatch("project: basis and vector dimensions differ");
    out += b.dot(v) * b;
  }
  return out;
}

// Projection onto the column span of an orthonormal `basis` (dim x k).
inline Vector project(const Vector& v, const Matrix& basis) {
  if (basis.cols() == 0) return Vector::Zero(v.size());
  if (basis.rows() != v.size())
    throw DimensionMismatch("project: basis and vector dimensions differ");
  return basis * (basis.transpose() * v);
}

struct Svd {
  Matrix u;       // rows x k, orthonormal columns
  Vector sigma;   // k = min(rows, cols), nonincreasing
  Matrix v;       // cols x k, orthonormal columns
};

// Thin SVD backed by Eigen's two-sided Jacobi solver. Singular pairs are
// sign-canonicalized: the first nonzero entry of every right singular
// vector is positive.
inline Svd svd(const Matrix& m) {
  if (!m.allFinite()) throw NonConvergence("svd: non-finite input", NAN);
  Svd out;
  if (m.size() == 0) {
    out.u = Matrix::Zero(m.rows(), 0);
    out.v = Matrix::Zero(m.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("svd: Jacobi sweeps did not converge", NAN);
  out.u = solver.matrixU();
  out.sigma = solver.singularValues();
  out.v = solver.matrixV();
  for (Index k = 0; k < out.v.cols(); ++k) {
    for (Index i = 0; i < out.v.rows(); ++i) {
      const double x = out.v(i, k);
      if (std::abs(x) > 1e-14) {
        if (x < 0) {
          out.v.col(k) *= -1.0;
          out.u.col(k) *= -1.0;
        }
        break;
      }
    }
  }
  const double scale = m.norm();
  const double err =
      (m - out.u * out.sigma.asDiagonal() * out.v.transpose()).norm();
  if (err > 1e-8 * std::max(scale, 1.0))
    throw NonConvergence("svd: reconstruction failed", err);
  return out;
}

inline Vector singular_values(const Matrix& m) { return svd(m).sigma; }

// Minimum-norm minimizer of ||m c - b||_2 via the SVD pseudoinverse;
// singular values below 1e-12 * sigma_1 are treated as zero.
inline Vector solve_lsq(const Matrix& m, const Vector& b) {
  if (m.rows() != b.size()) {
    throw DimensionMismatch("solve_lsq: matrix has " + std::to_string(m.rows()) +
                            " rows but rhs has " + std::to_string(b.size()));
  }
  if (m.cols() == 0) return Vector::Zero(0);
  const Svd s = svd(m);
  const double cutoff = s.sigma.size() > 0 ? 1e-12 * s.sigma(0) : 0.0;
  Vector utb = s.u.transpose() * b;
  for (Index i = 0; i < s.sigma.size(); ++i)
    utb(i) = s.sigma(i) > cutoff && s.sigma(i) > 0 ? utb(i) / s.sigma(i) : 0.0;
  return s.v * utb;
}

// Numerical rank with tolerance relative to the largest singular value.
inline Index numerical_rank(const Matrix& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return 0;
  const Vector sigma = singular_values(m);
  const double cutoff = rel_tol * std::max(sigma(0), 1e-300) *
                        static_cast<double>(std::max(m.rows(), m.cols()));
  Index r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++r;
  return r;
}

}  // namespace atomgreed

#endif  // ATOMGREED_LINALG_HPP
