#ifndef ATOMGREED_TESTS_ORACLES_HPP
#define ATOMGREED_TESTS_ORACLES_HPP

// Slow, independent reference computations used only by the tests. Nothing
// here calls into the solver, condnum or submod code paths it checks.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double max_abs_inner(const Matrix& a, const Vector& v) {
  return (a.transpose() * v).cwiseAbs().maxCoeff();
}

// min over a uniform angle grid on [0, pi) of max_j |<v(phi), a_j>|, n = 2.
inline double circle_grid_theta(const Matrix& a, int points = 100000) {
  const double pi = std::acos(-1.0);
  double best = INFINITY;
  for (int k = 0; k < points; ++k) {
    const double phi = pi * k / points;
    Vector v(2);
    v << std::cos(phi), std::sin(phi);
    best = std::min(best, max_abs_inner(a, v));
  }
  return best;
}

// Fibonacci lattice on the 2-sphere, n = 3.
inline double sphere_grid_theta(const Matrix& a, int points = 1000000) {
  const double golden = std::acos(-1.0) * (3.0 - std::sqrt(5.0));
  double best = INFINITY;
  for (int k = 0; k < points; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / points;
    const double rho = std::sqrt(1.0 - z * z);
    Vector v(3);
    v << rho * std::cos(golden * k), rho * std::sin(golden * k), z;
    best = std::min(best, max_abs_inner(a, v));
  }
  return best;
}

// Central differences, step h per coordinate.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                         double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

// All k-subsets of {0..n-1} as index lists.
inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// g(S) = max_x f(x) - f(0) for f = -1/2 ||Phi x - b||^2 supported on S, solved
// through the normal equations of Phi_S.
inline double support_gain(const Matrix& phi, const Vector& b, const std::vector<int>& support) {
  if (support.empty()) return 0.0;
  Matrix sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = phi.col(support[j]);
  const Vector c = sub.colPivHouseholderQr().solve(b);
  return 0.5 * b.squaredNorm() - 0.5 * (sub * c - b).squaredNorm();
}

struct SupportOptimum {
  std::vector<int> support;
  double value = -INFINITY;
};

// Best support of size exactly k (monotone g makes this the |S| <= k optimum).
inline SupportOptimum best_support(const Matrix& phi, const Vector& b, int k) {
  SupportOptimum best;
  for (const auto& s : combinations(static_cast<int>(phi.cols()), k)) {
    const double v = support_gain(phi, b, s);
    if (v > best.value) best = {s, v};
  }
  return best;
}

// Naive gamma_{U,k} and kappa_{U,k} over explicit index lists, for
// cross-checking the bitmask implementations.
struct NaiveRatio {
  double value = INFINITY;
  bool defined = false;
};

inline bool subset_of(std::uint32_t a, std::uint32_t b) { return (a & ~b) == 0; }

inline NaiveRatio naive_gamma(const std::vector<double>& g, int p, std::uint32_t u, int k) {
  NaiveRatio out;
  for (std::uint32_t pset = 0; pset < (1u << p); ++pset) {
    if (!subset_of(pset, u)) continue;
    for (std::uint32_t q = 1; q < (1u << p); ++q) {
      if (q & pset) continue;
      int size = 0;
      double num = 0;
      for (int i = 0; i < p; ++i)
        if (q >> i & 1u) {
          ++size;
          num += g[pset | (1u << i)] - g[pset];
        }
      if (size > k) continue;
      const double den = g[pset | q] - g[pset];
      if (den < 1e-12) continue;
      out.defined = true;
      out.value = std::min(out.value, num / den);
    }
  }
  return out;
}

inline NaiveRatio naive_kappa(const std::vector<double>& g, int p, std::uint32_t u, int k) {
  NaiveRatio out;
  for (std::uint32_t v = 0; v < (1u << p); ++v) {
    if (!subset_of(u, v)) continue;
    int extra = 0;
    for (int i = 0; i < p; ++i) extra += ((v & ~u) >> i) & 1u;
    if (extra > k) continue;
    for (std::uint32_t t = 0; t < (1u << p); ++t) {
      if (!subset_of(t, u)) continue;
      for (int i = 0; i < p; ++i) {
        if (v >> i & 1u) continue;
        const double den = g[v | (1u << i)] - g[v];
        if (den < 1e-12) continue;
        out.defined = true;
        out.value = std::min(out.value, (g[t | (1u << i)] - g[t]) / den);
      }
    }
  }
  return out;
}

// Largest principal angle between the column spans of two matrices with
// orthonormal columns and equal rank: asin of ||(I - Q1 Q1^T) Q2||_2.
inline double max_principal_angle(const Matrix& q1, const Matrix& q2) {
  const Matrix residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

}  // namespace oracle

#endif  // ATOMGREED_TESTS_ORACLES_HPP
